#pragma once

#include <vector>

#include "doagc/tensor.hpp"

namespace doagc {

struct MetricsBundle {
    double acc = 0.0;
    double nmi = 0.0;
    double ari = 0.0;
    double f1 = 0.0;
};

// Minimum-cost perfect matching on a square cost matrix (Kuhn-Munkres with
// potentials, O(k^3)). Returns perm with perm[row] = matched column.
std::vector<int> hungarian(const Tensor& cost);

// Clustering accuracy maximized over a Hungarian matching of cluster ids to
// class ids.
double accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

// Normalized mutual information with arithmetic-mean normalization.
double nmi(const std::vector<int>& pred, const std::vector<int>& truth);

// Adjusted Rand index.
double ari(const std::vector<int>& pred, const std::vector<int>& truth);

// Macro-averaged F1 after mapping predicted clusters through the Hungarian
// matching; averaged over classes present in the ground truth.
double macro_f1(const std::vector<int>& pred, const std::vector<int>& truth);

// Same mapping, classes weighted by their ground-truth support.
double weighted_f1(const std::vector<int>& pred, const std::vector<int>& truth);

MetricsBundle evaluate_clustering(const std::vector<int>& pred, const std::vector<int>& truth);

} // namespace doagc
