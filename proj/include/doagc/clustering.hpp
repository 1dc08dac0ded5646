#pragma once

#include <random>
#include <vector>

#include "doagc/graph.hpp"
#include "doagc/tensor.hpp"

namespace doagc {

struct ClusterResult {
    std::vector<int> assignments; // length N, values in [0,k)
    Tensor centers;               // k x d
    double inertia = 0.0;         // sum of squared distances to assigned centers
    Tensor onehot;                // N x k pseudo-label matrix
};

// Lloyd's algorithm with k-means++ seeding, best-of-n_init restarts (ties
// broken by restart index), empty clusters repaired by seizing the point
// farthest from its current center. Deterministic for a given rng state.
ClusterResult kmeans(const Tensor& x, int k, int n_init, int max_iter, double tol,
                     std::mt19937_64& rng);

inline ClusterResult kmeans(const Tensor& x, int k, std::mt19937_64& rng) {
    return kmeans(x, k, 10, 300, 1e-4, rng);
}

} // namespace doagc
