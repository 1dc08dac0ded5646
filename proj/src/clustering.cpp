#include "doagc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace doagc {

namespace {

double sq_dist(const Tensor& x, std::size_t i, const Tensor& c, std::size_t ci) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const double d = x(i, j) - c(ci, j);
        s += d * d;
    }
    return s;
}

Tensor kmeanspp_seed(const Tensor& x, int k, std::mt19937_64& rng) {
    const std::size_t n = x.rows(), d = x.cols();
    Tensor centers(static_cast<std::size_t>(k), d);
    std::uniform_int_distribution<std::size_t> uni(0, n - 1);
    std::size_t first = uni(rng);
    for (std::size_t j = 0; j < d; ++j) centers(0, j) = x(first, j);

    std::vector<double> dist2(n);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::max();
            for (int cc = 0; cc < c; ++cc) best = std::min(best, sq_dist(x, i, centers, cc));
            dist2[i] = best;
            total += best;
        }
        std::size_t pick;
        if (total <= 0.0) {
            pick = uni(rng); // all points coincide with a chosen center
        } else {
            std::uniform_real_distribution<double> ur(0.0, total);
            double u = ur(rng);
            pick = n - 1;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += dist2[i];
                if (u < acc) {
                    pick = i;
                    break;
                }
            }
        }
        for (std::size_t j = 0; j < d; ++j) centers(c, j) = x(pick, j);
    }
    return centers;
}

struct LloydRun {
    std::vector<int> assignments;
    Tensor centers;
    double inertia;
};

LloydRun lloyd(const Tensor& x, int k, int max_iter, double tol, Tensor centers) {
    const std::size_t n = x.rows(), d = x.cols();
    std::vector<int> assign(n, 0);
    std::vector<std::size_t> counts(k);

    auto assign_all = [&]() {
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::max();
            int bestc = 0;
            for (int c = 0; c < k; ++c) {
                const double dd = sq_dist(x, i, centers, c);
                if (dd < best) {
                    best = dd;
                    bestc = c;
                }
            }
            assign[i] = bestc;
        }
        std::fill(counts.begin(), counts.end(), 0);
        for (int a : assign) ++counts[a];
    };

    // give each empty cluster the point farthest from its current center;
    // the seized point becomes the cluster's center, so inertia cannot grow
    auto repair_empties = [&]() {
        for (int c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            double worst = -1.0;
            std::size_t steal = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[assign[i]] <= 1) continue;
                const double dd = sq_dist(x, i, centers, assign[i]);
                if (dd > worst) {
                    worst = dd;
                    steal = i;
                }
            }
            --counts[assign[steal]];
            assign[steal] = c;
            counts[c] = 1;
            for (std::size_t j = 0; j < d; ++j) centers(c, j) = x(steal, j);
        }
    };

    for (int it = 0; it < max_iter; ++it) {
        assign_all();
        repair_empties();

        Tensor next(static_cast<std::size_t>(k), d);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) next(assign[i], j) += x(i, j);
        }
        double shift = 0.0;
        for (int c = 0; c < k; ++c) {
            double moved = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double m = next(c, j) / static_cast<double>(counts[c]);
                const double dd = m - centers(c, j);
                moved += dd * dd;
                centers(c, j) = m;
            }
            shift = std::max(shift, std::sqrt(moved));
        }
        if (shift < tol) break;
    }

    // end on an assignment step so labels match the settled centers
    assign_all();
    repair_empties();
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) inertia += sq_dist(x, i, centers, assign[i]);
    return {std::move(assign), std::move(centers), inertia};
}

} // namespace

ClusterResult kmeans(const Tensor& x, int k, int n_init, int max_iter, double tol,
                     std::mt19937_64& rng) {
    if (k < 1) throw ContractError("kmeans: k must be >= 1");
    if (static_cast<std::size_t>(k) > x.rows()) {
        throw ContractError("kmeans: k=" + std::to_string(k) + " exceeds " +
                            std::to_string(x.rows()) + " points");
    }
    if (n_init < 1) throw ContractError("kmeans: n_init must be >= 1");

    LloydRun best;
    best.inertia = std::numeric_limits<double>::max();
    for (int r = 0; r < n_init; ++r) {
        LloydRun run = lloyd(x, k, max_iter, tol, kmeanspp_seed(x, k, rng));
        if (run.inertia < best.inertia) best = std::move(run); // ties keep earlier restart
    }

    ClusterResult res;
    res.assignments = std::move(best.assignments);
    res.centers = std::move(best.centers);
    res.inertia = best.inertia;
    res.onehot = to_onehot(res.assignments, k);
    return res;
}

} // namespace doagc
