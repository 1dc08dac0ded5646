#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "doagc/tensor.hpp"

namespace doagc {

// Square nonnegative edge-weight matrix. Original graphs are binary with a
// unit diagonal; reconstructions carry real weights.
struct Adjacency {
    Tensor matrix;

    std::size_t n() const { return matrix.rows(); }
    void validate() const;
    bool is_binary_with_unit_diagonal() const;
};

// V edge structures over N shared nodes, one feature matrix, optional labels.
struct MultiViewGraph {
    std::size_t n = 0;
    std::vector<Adjacency> views;
    Tensor features;                        // N x d
    std::optional<std::vector<int>> labels; // values in [0, k)

    std::size_t num_views() const { return views.size(); }
    void validate() const;
};

// Per-view learned state after training.
struct ViewState {
    Tensor z;        // N x d_Z embedding
    Tensor s;        // N x N similarity graph
    Adjacency a_hat; // reconstruction S + w*A
    double w = 0.0;  // adaptive weight in [0,1]
    Tensor h;        // N x d_Z aggregated view embedding
    double alpha = 1.0;
};

// S = norm(z) * norm(z)^T with negatives clamped to 0 and values capped at 1.
// Symmetric; unit diagonal for nonzero rows.
Tensor cosine_similarity_graph(const Tensor& z);

// Fraction of non-self edges joining same-label endpoints:
//   sum_ij(A_ij * (Y Y^T)_ij - I_ij) / sum_ij(A_ij - I_ij).
// Requires a binary adjacency with unit diagonal and one-hot label rows.
// Returns 0 when the graph has no non-self edges.
double edge_homophily(const Adjacency& a, const Tensor& labels_onehot);

// Weight-valued generalization used for S and A-hat: same-label off-diagonal
// mass over total off-diagonal mass. Returns 0 when there is no such mass.
double weighted_homophily(const Tensor& weights, const Tensor& labels_onehot);

// A-hat = S + w * A.
Adjacency reconstruct(const Tensor& s, const Adjacency& a, double w);

// Order-fold application of the row-normalized graph: rsn(A-hat)^order * x.
Tensor aggregate(const Adjacency& a_hat, const Tensor& x, int order);

// Keeps the k largest entries per row of a symmetric similarity matrix and
// re-symmetrizes the survivor mask by max. Returns the 0/1 mask.
Tensor topk_row_mask(const Tensor& s, std::size_t k);

Tensor to_onehot(const std::vector<int>& assignments, int k);

} // namespace doagc
