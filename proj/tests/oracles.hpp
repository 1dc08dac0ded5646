#pragma once

// Independent reference implementations the test suites check against.
// Nothing here may call the library code paths under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "doagc/tensor.hpp"

namespace oracle {

// Central finite differences of f with respect to every entry of x,
// evaluated by mutating x in place and restoring it.
inline doagc::Tensor fd_gradient(const std::function<double()>& f, doagc::Tensor& x,
                                 double step = 1e-5) {
    doagc::Tensor g(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double orig = x.data()[i];
        x.data()[i] = orig + step;
        const double fp = f();
        x.data()[i] = orig - step;
        const double fm = f();
        x.data()[i] = orig;
        g.data()[i] = (fp - fm) / (2.0 * step);
    }
    return g;
}

// Largest relative deviation between two gradients, with an absolute floor so
// finite-difference noise around true zeros does not register.
inline double max_rel_err(const doagc::Tensor& a, const doagc::Tensor& b, double atol = 1e-8) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double av = a.data()[i], bv = b.data()[i];
        const double err = std::abs(av - bv);
        if (err <= atol) continue;
        worst = std::max(worst, err / std::max({std::abs(av), std::abs(bv), atol}));
    }
    return worst;
}

// Exhaustive minimum-cost assignment for k <= 8.
inline std::pair<std::vector<int>, double> brute_force_assignment(const doagc::Tensor& cost) {
    const int n = static_cast<int>(cost.rows());
    std::vector<int> perm(n), best(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best_cost = std::numeric_limits<double>::max();
    do {
        double c = 0.0;
        for (int i = 0; i < n; ++i) c += cost(i, perm[i]);
        if (c < best_cost) {
            best_cost = c;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {best, best_cost};
}

// Clustering accuracy by exhaustive search over cluster-to-class bijections.
inline double brute_force_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    const int k = 1 + std::max(*std::max_element(pred.begin(), pred.end()),
                               *std::max_element(truth.begin(), truth.end()));
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    long long best = 0;
    do {
        long long hits = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            if (perm[pred[i]] == truth[i]) ++hits;
        }
        best = std::max(best, hits);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(pred.size());
}

// NMI straight from the textbook formulas over an std::map contingency table.
inline double contingency_nmi(const std::vector<int>& pred, const std::vector<int>& truth) {
    const double n = static_cast<double>(pred.size());
    std::map<int, double> cp, ct;
    std::map<std::pair<int, int>, double> joint;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        cp[pred[i]] += 1.0;
        ct[truth[i]] += 1.0;
        joint[{pred[i], truth[i]}] += 1.0;
    }
    double hp = 0.0, ht = 0.0, mi = 0.0;
    for (auto& [_, c] : cp) hp -= c / n * std::log(c / n);
    for (auto& [_, c] : ct) ht -= c / n * std::log(c / n);
    for (auto& [pt, c] : joint) {
        mi += c / n * std::log((c / n) / ((cp[pt.first] / n) * (ct[pt.second] / n)));
    }
    if (hp == 0.0 && ht == 0.0) return 1.0;
    const double norm = 0.5 * (hp + ht);
    return norm > 0.0 ? std::clamp(mi / norm, 0.0, 1.0) : 0.0;
}

// ARI from pair counts rather than the contingency shortcut formula:
// classifies every unordered sample pair as agreeing or not in each labeling.
inline double pairwise_ari(const std::vector<int>& pred, const std::vector<int>& truth) {
    const std::size_t n = pred.size();
    double n11 = 0.0, n00 = 0.0, n10 = 0.0, n01 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool same_p = pred[i] == pred[j];
            const bool same_t = truth[i] == truth[j];
            if (same_p && same_t) n11 += 1.0;
            else if (same_p) n10 += 1.0;
            else if (same_t) n01 += 1.0;
            else n00 += 1.0;
        }
    }
    const double total = n11 + n00 + n10 + n01;
    const double expected = (n11 + n10) * (n11 + n01) / total;
    const double maximum = 0.5 * ((n11 + n10) + (n11 + n01));
    if (maximum == expected) return 1.0;
    return (n11 - expected) / (maximum - expected);
}

namespace detail {

inline double macro_f1_under(const std::vector<int>& mapping, const std::vector<int>& pred,
                             const std::vector<int>& truth, int k) {
    std::vector<char> present(k, 0);
    for (int t : truth) present[t] = 1;
    double sum = 0.0;
    int classes = 0;
    for (int c = 0; c < k; ++c) {
        if (!present[c]) continue;
        double tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const bool p = mapping[pred[i]] == c;
            const bool t = truth[i] == c;
            if (p && t) ++tp;
            else if (p) ++fp;
            else if (t) ++fn;
        }
        const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
        const double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
        sum += prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
        ++classes;
    }
    return sum / classes;
}

} // namespace detail

// Macro F1 for every overlap-maximizing cluster-to-class bijection. Ties in
// the optimal matching make F1 matching-dependent, so the implementation must
// land on one of these values.
inline std::vector<double> macro_f1_candidates(const std::vector<int>& pred,
                                               const std::vector<int>& truth) {
    const int k = 1 + std::max(*std::max_element(pred.begin(), pred.end()),
                               *std::max_element(truth.begin(), truth.end()));
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    long long best = -1;
    std::vector<std::vector<int>> winners;
    do {
        long long hits = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            if (perm[pred[i]] == truth[i]) ++hits;
        }
        if (hits > best) {
            best = hits;
            winners.clear();
        }
        if (hits == best) winners.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::vector<double> out;
    out.reserve(winners.size());
    for (const auto& w : winners) out.push_back(detail::macro_f1_under(w, pred, truth, k));
    return out;
}

// Macro F1 of the first optimal mapping; equals the library value whenever
// the optimal matching is unique.
inline double brute_force_macro_f1(const std::vector<int>& pred, const std::vector<int>& truth) {
    return macro_f1_candidates(pred, truth).front();
}

// Reference Adam recurrence on a single scalar.
struct ScalarAdam {
    double lr, b1, b2, eps;
    double m = 0.0, v = 0.0;
    long long t = 0;

    double update(double g) {
        ++t;
        m = b1 * m + (1 - b1) * g;
        v = b2 * v + (1 - b2) * g * g;
        const double mhat = m / (1 - std::pow(b1, static_cast<double>(t)));
        const double vhat = v / (1 - std::pow(b2, static_cast<double>(t)));
        return -lr * mhat / (std::sqrt(vhat) + eps);
    }
};

inline doagc::Tensor random_tensor(std::size_t r, std::size_t c, std::mt19937_64& rng,
                                   double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    doagc::Tensor t(r, c);
    for (double& v : t.values()) v = u(rng);
    return t;
}

// Uniform in [lo,hi] but bounced away from zero, for kink-free relu probes.
inline doagc::Tensor random_tensor_away_from_zero(std::size_t r, std::size_t c,
                                                  std::mt19937_64& rng, double margin = 0.05) {
    doagc::Tensor t = random_tensor(r, c, rng);
    for (double& v : t.values()) {
        if (std::abs(v) < margin) v = v < 0 ? v - margin : v + margin;
    }
    return t;
}

} // namespace oracle
