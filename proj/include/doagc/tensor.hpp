#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "doagc/errors.hpp"

namespace doagc {

// Guard against division by zero in the row normalizers.
inline constexpr double kEpsNorm = 1e-12;
// Floor for log arguments.
inline constexpr double kEpsLog = 1e-12;

// Dense row-major matrix of 64-bit reals. All kernels are sequential and
// accumulate in row-major order, so results are bit-reproducible.
class Tensor {
public:
    Tensor() = default;
    Tensor(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Tensor(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Tensor zeros(std::size_t rows, std::size_t cols) { return Tensor(rows, cols); }
    static Tensor ones(std::size_t rows, std::size_t cols);
    static Tensor full(std::size_t rows, std::size_t cols, double v);
    static Tensor identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    bool same_shape(const Tensor& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
    bool all_finite() const;

    double sum() const;
    double min() const;
    double max() const;

    bool operator==(const Tensor& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);

Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
// log(max(x, kEpsLog)), so log_safe(0) == log(1e-12).
Tensor log_safe(const Tensor& a);

// Each row divided by max(||row||_2, kEpsNorm); zero rows stay zero.
Tensor row_l2_normalize(const Tensor& a);
// Each row divided by max(row sum, kEpsNorm). Requires nonnegative entries.
Tensor row_sum_normalize(const Tensor& a);

// Per-column (x - min) / (max - min); constant columns map to 0.
Tensor min_max_scale_columns(const Tensor& a);

} // namespace doagc
