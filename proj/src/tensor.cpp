#include "doagc/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace doagc {

namespace {

std::string shape_str(const Tensor& t) {
    return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b));
    }
}

template <class F>
Tensor unary(const Tensor& a, F f) {
    Tensor out(a.rows(), a.cols());
    const double* x = a.data();
    double* y = out.data();
    for (std::size_t i = 0; i < a.size(); ++i) y[i] = f(x[i]);
    return out;
}

} // namespace

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("Tensor: data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(rows_) + "x" + std::to_string(cols_));
    }
}

Tensor Tensor::ones(std::size_t rows, std::size_t cols) { return full(rows, cols, 1.0); }

Tensor Tensor::full(std::size_t rows, std::size_t cols, double v) {
    Tensor t(rows, cols);
    std::fill(t.data_.begin(), t.data_.end(), v);
    return t;
}

Tensor Tensor::identity(std::size_t n) {
    Tensor t(n, n);
    for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
    return t;
}

bool Tensor::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

double Tensor::sum() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s;
}

double Tensor::min() const {
    double m = data_.empty() ? 0.0 : data_[0];
    for (double v : data_) m = std::min(m, v);
    return m;
}

double Tensor::max() const {
    double m = data_.empty() ? 0.0 : data_[0];
    for (double v : data_) m = std::max(m, v);
    return m;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions " + shape_str(a) + " * " + shape_str(b));
    }
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    Tensor out(n, m);
    const double* A = a.data();
    const double* B = b.data();
    double* C = out.data();
    // i-k-j order: streams B and C rows, vectorizes the inner loop.
    for (std::size_t i = 0; i < n; ++i) {
        const double* Ai = A + i * k;
        double* Ci = C + i * m;
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double aik = Ai[kk];
            const double* Bk = B + kk * m;
            for (std::size_t j = 0; j < m; ++j) Ci[j] += aik * Bk[j];
        }
    }
    return out;
}

Tensor transpose(const Tensor& a) {
    Tensor out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    Tensor out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] + b.data()[i];
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    Tensor out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] - b.data()[i];
    return out;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    Tensor out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
    return out;
}

Tensor scale(const Tensor& a, double c) {
    return unary(a, [c](double x) { return c * x; });
}

Tensor relu(const Tensor& a) {
    return unary(a, [](double x) { return x > 0.0 ? x : 0.0; });
}

Tensor sigmoid(const Tensor& a) {
    return unary(a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); });
}

Tensor log_safe(const Tensor& a) {
    return unary(a, [](double x) { return std::log(std::max(x, kEpsLog)); });
}

Tensor row_l2_normalize(const Tensor& a) {
    Tensor out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double ss = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) ss += a(i, j) * a(i, j);
        const double inv = 1.0 / std::max(std::sqrt(ss), kEpsNorm);
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) * inv;
    }
    return out;
}

Tensor row_sum_normalize(const Tensor& a) {
    Tensor out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (a(i, j) < 0.0) {
                throw DomainError("row_sum_normalize: negative entry at (" + std::to_string(i) +
                                  "," + std::to_string(j) + ")");
            }
            s += a(i, j);
        }
        const double inv = 1.0 / std::max(s, kEpsNorm);
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) * inv;
    }
    return out;
}

Tensor min_max_scale_columns(const Tensor& a) {
    Tensor out(a.rows(), a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) {
        double lo = a(0, j), hi = a(0, j);
        for (std::size_t i = 1; i < a.rows(); ++i) {
            lo = std::min(lo, a(i, j));
            hi = std::max(hi, a(i, j));
        }
        const double range = hi - lo;
        if (range > 0.0) {
            for (std::size_t i = 0; i < a.rows(); ++i) out(i, j) = (a(i, j) - lo) / range;
        }
        // constant columns stay 0
    }
    return out;
}

} // namespace doagc
