#include "doagc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace doagc {

namespace {

void require_valid_pair(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.size() != truth.size()) {
        throw ShapeError("metrics: label vectors of length " + std::to_string(pred.size()) +
                         " vs " + std::to_string(truth.size()));
    }
    if (pred.empty()) throw ContractError("metrics: empty label vectors");
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] < 0 || truth[i] < 0) throw DomainError("metrics: negative label id");
    }
}

int max_label(const std::vector<int>& v) { return *std::max_element(v.begin(), v.end()); }

// contingency[p][t] = #samples with pred p and truth t
std::vector<std::vector<long long>> contingency(const std::vector<int>& pred,
                                                const std::vector<int>& truth, int k) {
    std::vector<std::vector<long long>> c(k, std::vector<long long>(k, 0));
    for (std::size_t i = 0; i < pred.size(); ++i) ++c[pred[i]][truth[i]];
    return c;
}

double comb2(long long n) { return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1); }

// Hungarian mapping pred-cluster -> truth-class maximizing total overlap.
std::vector<int> overlap_matching(const std::vector<std::vector<long long>>& cont, int k) {
    Tensor cost(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
    for (int p = 0; p < k; ++p)
        for (int t = 0; t < k; ++t) cost(p, t) = -static_cast<double>(cont[p][t]);
    return hungarian(cost);
}

} // namespace

std::vector<int> hungarian(const Tensor& cost) {
    if (cost.rows() != cost.cols()) {
        throw ShapeError("hungarian: cost matrix is " + std::to_string(cost.rows()) + "x" +
                         std::to_string(cost.cols()));
    }
    if (!cost.all_finite()) throw DomainError("hungarian: non-finite cost");
    const int n = static_cast<int>(cost.rows());

    // potentials over rows/cols, 1-based with a virtual 0 column
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0); // match[col] = row occupying col
    std::vector<int> way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, std::numeric_limits<double>::max());
        std::vector<char> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = match[j0];
            double delta = std::numeric_limits<double>::max();
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> perm(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (match[j] > 0) perm[match[j] - 1] = j - 1;
    }
    return perm;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    require_valid_pair(pred, truth);
    const int k = std::max(max_label(pred), max_label(truth)) + 1;
    const auto cont = contingency(pred, truth, k);
    const std::vector<int> perm = overlap_matching(cont, k);
    long long matched = 0;
    for (int p = 0; p < k; ++p) matched += cont[p][perm[p]];
    return static_cast<double>(matched) / static_cast<double>(pred.size());
}

double nmi(const std::vector<int>& pred, const std::vector<int>& truth) {
    require_valid_pair(pred, truth);
    const int k = std::max(max_label(pred), max_label(truth)) + 1;
    const auto cont = contingency(pred, truth, k);
    const double n = static_cast<double>(pred.size());

    std::vector<long long> rp(k, 0), rt(k, 0);
    for (int p = 0; p < k; ++p)
        for (int t = 0; t < k; ++t) {
            rp[p] += cont[p][t];
            rt[t] += cont[p][t];
        }

    double hp = 0.0, ht = 0.0, mi = 0.0;
    for (int p = 0; p < k; ++p) {
        if (rp[p] > 0) hp -= rp[p] / n * std::log(rp[p] / n);
    }
    for (int t = 0; t < k; ++t) {
        if (rt[t] > 0) ht -= rt[t] / n * std::log(rt[t] / n);
    }
    for (int p = 0; p < k; ++p) {
        for (int t = 0; t < k; ++t) {
            if (cont[p][t] == 0) continue;
            const double pij = cont[p][t] / n;
            mi += pij * std::log(pij * n * n / (static_cast<double>(rp[p]) * rt[t]));
        }
    }
    if (hp == 0.0 && ht == 0.0) return 1.0; // both single-cluster: identical partitions
    const double norm = 0.5 * (hp + ht);
    if (norm <= 0.0) return 0.0;
    return std::clamp(mi / norm, 0.0, 1.0);
}

double ari(const std::vector<int>& pred, const std::vector<int>& truth) {
    require_valid_pair(pred, truth);
    const int k = std::max(max_label(pred), max_label(truth)) + 1;
    const auto cont = contingency(pred, truth, k);
    const long long n = static_cast<long long>(pred.size());

    double sum_ij = 0.0, sum_p = 0.0, sum_t = 0.0;
    std::vector<long long> rp(k, 0), rt(k, 0);
    for (int p = 0; p < k; ++p)
        for (int t = 0; t < k; ++t) {
            sum_ij += comb2(cont[p][t]);
            rp[p] += cont[p][t];
            rt[t] += cont[p][t];
        }
    for (int p = 0; p < k; ++p) sum_p += comb2(rp[p]);
    for (int t = 0; t < k; ++t) sum_t += comb2(rt[t]);

    const double expected = sum_p * sum_t / comb2(n);
    const double maximum = 0.5 * (sum_p + sum_t);
    const double denom = maximum - expected;
    if (denom == 0.0) return 1.0; // degenerate partitions that already agree
    return (sum_ij - expected) / denom;
}

namespace {

double matched_f1(const std::vector<int>& pred, const std::vector<int>& truth, bool weighted) {
    require_valid_pair(pred, truth);
    const int k = std::max(max_label(pred), max_label(truth)) + 1;
    const auto cont = contingency(pred, truth, k);
    const std::vector<int> perm = overlap_matching(cont, k);

    std::vector<int> mapped(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) mapped[i] = perm[pred[i]];

    std::vector<long long> support(k, 0);
    for (int t : truth) ++support[t];

    double f1_sum = 0.0;
    double weight_sum = 0.0;
    for (int c = 0; c < k; ++c) {
        if (support[c] == 0) continue;
        long long tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            const bool p = mapped[i] == c;
            const bool t = truth[i] == c;
            if (p && t) ++tp;
            else if (p) ++fp;
            else if (t) ++fn;
        }
        const double prec = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
        const double rec = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
        const double f1 = prec + rec > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
        const double weight = weighted ? static_cast<double>(support[c]) : 1.0;
        f1_sum += weight * f1;
        weight_sum += weight;
    }
    return f1_sum / weight_sum;
}

} // namespace

double macro_f1(const std::vector<int>& pred, const std::vector<int>& truth) {
    return matched_f1(pred, truth, false);
}

double weighted_f1(const std::vector<int>& pred, const std::vector<int>& truth) {
    return matched_f1(pred, truth, true);
}

MetricsBundle evaluate_clustering(const std::vector<int>& pred, const std::vector<int>& truth) {
    return {accuracy(pred, truth), nmi(pred, truth), ari(pred, truth), macro_f1(pred, truth)};
}

} // namespace doagc
