#include "doagc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace doagc {

void Adjacency::validate() const {
    if (matrix.rows() != matrix.cols()) {
        throw ShapeError("Adjacency: matrix is " + std::to_string(matrix.rows()) + "x" +
                         std::to_string(matrix.cols()) + ", expected square");
    }
    for (double v : matrix.values()) {
        if (!(v >= 0.0)) throw DomainError("Adjacency: negative or non-finite entry");
    }
}

bool Adjacency::is_binary_with_unit_diagonal() const {
    if (matrix.rows() != matrix.cols()) return false;
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        if (matrix(i, i) != 1.0) return false;
        for (std::size_t j = 0; j < matrix.cols(); ++j) {
            const double v = matrix(i, j);
            if (v != 0.0 && v != 1.0) return false;
            if (v != matrix(j, i)) return false;
        }
    }
    return true;
}

void MultiViewGraph::validate() const {
    if (views.empty()) throw ContractError("MultiViewGraph: needs at least one view");
    if (features.rows() != n) {
        throw ShapeError("MultiViewGraph: features have " + std::to_string(features.rows()) +
                         " rows for " + std::to_string(n) + " nodes");
    }
    if (!features.all_finite()) throw DomainError("MultiViewGraph: non-finite feature entry");
    for (const Adjacency& a : views) {
        if (a.n() != n) throw ShapeError("MultiViewGraph: view size mismatch");
        if (!a.is_binary_with_unit_diagonal()) {
            throw DomainError("MultiViewGraph: view is not binary symmetric with self-loops");
        }
    }
    if (labels) {
        if (labels->size() != n) throw ShapeError("MultiViewGraph: label count mismatch");
        for (int y : *labels) {
            if (y < 0) throw DomainError("MultiViewGraph: negative label");
        }
    }
}

Tensor cosine_similarity_graph(const Tensor& z) {
    const Tensor zn = row_l2_normalize(z);
    Tensor s = matmul(zn, transpose(zn));
    for (double& v : s.values()) v = std::clamp(v, 0.0, 1.0);
    return s;
}

namespace {

// labels_onehot rows must each contain a single 1 with all other entries 0.
std::vector<int> onehot_to_labels(const Tensor& onehot) {
    std::vector<int> labels(onehot.rows(), -1);
    for (std::size_t i = 0; i < onehot.rows(); ++i) {
        int hot = -1;
        for (std::size_t j = 0; j < onehot.cols(); ++j) {
            const double v = onehot(i, j);
            if (v == 1.0) {
                if (hot >= 0) throw DomainError("labels: row " + std::to_string(i) + " has two ones");
                hot = static_cast<int>(j);
            } else if (v != 0.0) {
                throw DomainError("labels: row " + std::to_string(i) + " is not one-hot");
            }
        }
        if (hot < 0) throw DomainError("labels: row " + std::to_string(i) + " has no one");
        labels[i] = hot;
    }
    return labels;
}

} // namespace

double edge_homophily(const Adjacency& a, const Tensor& labels_onehot) {
    if (!a.is_binary_with_unit_diagonal()) {
        throw DomainError("edge_homophily: adjacency must be binary with unit diagonal");
    }
    if (labels_onehot.rows() != a.n()) {
        throw ShapeError("edge_homophily: label rows do not match node count");
    }
    const std::vector<int> y = onehot_to_labels(labels_onehot);
    double same = 0.0, total = 0.0;
    for (std::size_t i = 0; i < a.n(); ++i) {
        for (std::size_t j = 0; j < a.n(); ++j) {
            if (i == j) continue;
            if (a.matrix(i, j) != 0.0) {
                total += 1.0;
                if (y[i] == y[j]) same += 1.0;
            }
        }
    }
    return total > 0.0 ? same / total : 0.0;
}

double weighted_homophily(const Tensor& weights, const Tensor& labels_onehot) {
    if (weights.rows() != weights.cols()) {
        throw ShapeError("weighted_homophily: matrix must be square");
    }
    if (labels_onehot.rows() != weights.rows()) {
        throw ShapeError("weighted_homophily: label rows do not match node count");
    }
    const std::vector<int> y = onehot_to_labels(labels_onehot);
    double same = 0.0, total = 0.0;
    for (std::size_t i = 0; i < weights.rows(); ++i) {
        for (std::size_t j = 0; j < weights.cols(); ++j) {
            if (i == j) continue;
            const double v = weights(i, j);
            total += v;
            if (y[i] == y[j]) same += v;
        }
    }
    return total > kEpsNorm ? same / total : 0.0;
}

Adjacency reconstruct(const Tensor& s, const Adjacency& a, double w) {
    if (!s.same_shape(a.matrix)) {
        throw ShapeError("reconstruct: S and A shapes differ");
    }
    if (!(w >= 0.0 && w <= 1.0)) {
        throw ContractError("reconstruct: w must lie in [0,1]");
    }
    return Adjacency{add(s, scale(a.matrix, w))};
}

Tensor aggregate(const Adjacency& a_hat, const Tensor& x, int order) {
    if (order < 1) throw ContractError("aggregate: order must be >= 1");
    const Tensor norm = row_sum_normalize(a_hat.matrix);
    Tensor out = x;
    for (int i = 0; i < order; ++i) out = matmul(norm, out);
    return out;
}

Tensor topk_row_mask(const Tensor& s, std::size_t k) {
    const std::size_t n = s.rows();
    Tensor mask(n, s.cols());
    if (k >= s.cols()) {
        return Tensor::ones(n, s.cols());
    }
    std::vector<std::size_t> idx(s.cols());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < s.cols(); ++j) idx[j] = j;
        std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                          [&](std::size_t a, std::size_t b) {
                              if (s(i, a) != s(i, b)) return s(i, a) > s(i, b);
                              return a < b; // deterministic tie-break
                          });
        for (std::size_t t = 0; t < k; ++t) mask(i, idx[t]) = 1.0;
    }
    // re-symmetrize by max: keep an entry if either endpoint keeps it
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double m = std::max(mask(i, j), mask(j, i));
            mask(i, j) = m;
            mask(j, i) = m;
        }
    }
    return mask;
}

Tensor to_onehot(const std::vector<int>& assignments, int k) {
    Tensor out(assignments.size(), static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        const int a = assignments[i];
        if (a < 0 || a >= k) {
            throw DomainError("to_onehot: label " + std::to_string(a) + " outside [0," +
                              std::to_string(k) + ") at row " + std::to_string(i));
        }
        out(i, static_cast<std::size_t>(a)) = 1.0;
    }
    return out;
}

} // namespace doagc
