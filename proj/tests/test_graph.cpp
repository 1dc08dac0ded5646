#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "doagc/graph.hpp"
#include "oracles.hpp"

using namespace doagc;

namespace {

Adjacency path3_with_loops() {
    // 0 - 1 - 2 plus self-loops
    Tensor a = Tensor::identity(3);
    a(0, 1) = a(1, 0) = 1.0;
    a(1, 2) = a(2, 1) = 1.0;
    return Adjacency{a};
}

} // namespace

TEST_CASE("cosine similarity: parallel, orthogonal and single rows") {
    Tensor z(3, 2, {1, 0, 2, 0, 0, 3});
    Tensor s = cosine_similarity_graph(z);
    CHECK(s(0, 1) == doctest::Approx(1.0));
    CHECK(s(1, 0) == doctest::Approx(1.0));
    CHECK(s(0, 2) == doctest::Approx(0.0));
    CHECK(s(2, 1) == doctest::Approx(0.0));
    for (int i = 0; i < 3; ++i) CHECK(s(i, i) == doctest::Approx(1.0));

    Tensor one_row(1, 4, {0.3, -2, 1, 0.5});
    CHECK(cosine_similarity_graph(one_row)(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("cosine similarity clamps negatives to zero") {
    Tensor z(2, 2, {1, 0, -1, 0});
    Tensor s = cosine_similarity_graph(z);
    CHECK(s(0, 1) == 0.0);
    CHECK(s(1, 0) == 0.0);
}

TEST_CASE("cosine similarity output is symmetric and bounded in [0,1]") {
    std::mt19937_64 rng(23);
    Tensor z = oracle::random_tensor(12, 5, rng);
    Tensor s = cosine_similarity_graph(z);
    for (std::size_t i = 0; i < s.rows(); ++i) {
        for (std::size_t j = 0; j < s.cols(); ++j) {
            CHECK(std::abs(s(i, j) - s(j, i)) < 1e-12);
            CHECK(s(i, j) >= 0.0);
            CHECK(s(i, j) <= 1.0);
        }
    }
}

TEST_CASE("edge homophily: hand-enumerated 3-node case") {
    // labels 0,0,1; edges (0,1) and (1,2) -> 4 directed non-self edges, 2 same-label
    Adjacency a = path3_with_loops();
    Tensor y = to_onehot({0, 0, 1}, 2);
    CHECK(edge_homophily(a, y) == doctest::Approx(0.5));
}

TEST_CASE("edge homophily: all same label and self-loop-only graphs") {
    Adjacency a = path3_with_loops();
    CHECK(edge_homophily(a, to_onehot({0, 0, 0}, 1)) == doctest::Approx(1.0));
    CHECK(edge_homophily(Adjacency{Tensor::identity(5)}, to_onehot({0, 1, 0, 1, 0}, 2)) == 0.0);
}

TEST_CASE("edge homophily rejects non-one-hot label rows") {
    Adjacency a = path3_with_loops();
    Tensor bad(3, 2, {1, 0, 0.5, 0.5, 0, 1});
    CHECK_THROWS_AS(edge_homophily(a, bad), DomainError);
}

TEST_CASE("edge homophily is invariant under label-id permutation") {
    std::mt19937_64 rng(31);
    const std::size_t n = 20;
    Tensor a = Tensor::identity(n);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (int e = 0; e < 40; ++e) {
        const std::size_t i = pick(rng), j = pick(rng);
        if (i == j) continue;
        a(i, j) = a(j, i) = 1.0;
    }
    std::vector<int> labels(n);
    std::uniform_int_distribution<int> lab(0, 3);
    for (int& v : labels) v = lab(rng);

    std::vector<int> relabeled(n);
    const int perm[4] = {2, 0, 3, 1};
    for (std::size_t i = 0; i < n; ++i) relabeled[i] = perm[labels[i]];

    Adjacency adj{a};
    CHECK(edge_homophily(adj, to_onehot(labels, 4)) ==
          doctest::Approx(edge_homophily(adj, to_onehot(relabeled, 4))).epsilon(1e-15));
}

TEST_CASE("weighted homophily matches the binary ratio on binary graphs") {
    Adjacency a = path3_with_loops();
    Tensor y = to_onehot({0, 0, 1}, 2);
    CHECK(weighted_homophily(a.matrix, y) == doctest::Approx(edge_homophily(a, y)));
    CHECK(weighted_homophily(Tensor::identity(3), to_onehot({0, 1, 0}, 2)) == 0.0);
}

TEST_CASE("weighted homophily weighs off-diagonal mass, ignoring the diagonal") {
    // same-label mass 2+2, cross mass 1+1, diagonal excluded
    Tensor w(3, 3, {9, 2, 1, 2, 9, 0, 1, 0, 9});
    CHECK(weighted_homophily(w, to_onehot({0, 0, 1}, 2)) == doctest::Approx(4.0 / 6.0));
}

TEST_CASE("reconstruct: ablation end points and hand arithmetic") {
    Tensor s(2, 2, {1, 0.5, 0.5, 1});
    Tensor ones_off = Tensor::identity(2);
    ones_off(0, 1) = ones_off(1, 0) = 1.0;
    Adjacency a{ones_off};

    CHECK(reconstruct(s, a, 0.0).matrix == s);

    Adjacency from_zero = reconstruct(Tensor::zeros(2, 2), a, 1.0);
    CHECK(from_zero.matrix == a.matrix);

    Adjacency mixed = reconstruct(s, a, 0.5);
    CHECK(mixed.matrix(0, 0) == doctest::Approx(1.5));
    CHECK(mixed.matrix(0, 1) == doctest::Approx(1.0));
    CHECK(mixed.matrix(1, 0) == doctest::Approx(1.0));
    CHECK(mixed.matrix(1, 1) == doctest::Approx(1.5));
}

TEST_CASE("reconstruct is entrywise monotone in w") {
    std::mt19937_64 rng(37);
    Tensor s = oracle::random_tensor(6, 6, rng, 0.0, 1.0);
    Tensor am = Tensor::identity(6);
    am(1, 4) = am(4, 1) = 1.0;
    Adjacency a{am};
    Tensor lo = reconstruct(s, a, 0.25).matrix;
    Tensor hi = reconstruct(s, a, 0.75).matrix;
    for (std::size_t i = 0; i < lo.size(); ++i) CHECK(lo.data()[i] <= hi.data()[i]);
}

TEST_CASE("reconstruct rejects shape mismatch and out-of-range w") {
    Adjacency a{Tensor::identity(3)};
    CHECK_THROWS_AS(reconstruct(Tensor::zeros(2, 2), a, 0.5), ShapeError);
    CHECK_THROWS_AS(reconstruct(Tensor::zeros(3, 3), a, 1.5), ContractError);
}

TEST_CASE("aggregate: identity graph, constant rows, path-graph means") {
    std::mt19937_64 rng(41);
    Tensor x = oracle::random_tensor(3, 4, rng);
    CHECK(aggregate(Adjacency{Tensor::identity(3)}, x, 3) == x);

    Tensor constant_rows(3, 2, {7, -2, 7, -2, 7, -2});
    Adjacency p = path3_with_loops();
    Tensor out = aggregate(p, constant_rows, 1);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(out(i, 0) == doctest::Approx(7.0));
        CHECK(out(i, 1) == doctest::Approx(-2.0));
    }

    // one-hot features make each output row the mean of the closed neighborhood
    Tensor onehot = Tensor::identity(3);
    Tensor m = aggregate(p, onehot, 1);
    CHECK(m(0, 0) == doctest::Approx(0.5));
    CHECK(m(0, 1) == doctest::Approx(0.5));
    CHECK(m(0, 2) == doctest::Approx(0.0));
    CHECK(m(1, 0) == doctest::Approx(1.0 / 3));
    CHECK(m(1, 1) == doctest::Approx(1.0 / 3));
    CHECK(m(1, 2) == doctest::Approx(1.0 / 3));
}

TEST_CASE("aggregate with order o equals o applications of order 1") {
    std::mt19937_64 rng(43);
    Tensor weights = oracle::random_tensor(7, 7, rng, 0.0, 1.0);
    Adjacency a{weights};
    Tensor x = oracle::random_tensor(7, 3, rng);

    Tensor direct = aggregate(a, x, 4);
    Tensor stepped = x;
    for (int i = 0; i < 4; ++i) stepped = aggregate(a, stepped, 1);
    double worst = 0.0;
    for (std::size_t i = 0; i < direct.size(); ++i) {
        worst = std::max(worst, std::abs(direct.data()[i] - stepped.data()[i]));
    }
    CHECK(worst < 1e-10);
    CHECK_THROWS_AS(aggregate(a, x, 0), ContractError);
}

TEST_CASE("topk row mask keeps k survivors and stays symmetric") {
    Tensor s(3, 3, {1.0, 0.9, 0.1, 0.9, 1.0, 0.5, 0.1, 0.5, 1.0});
    Tensor mask = topk_row_mask(s, 2);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(mask(i, j) == mask(j, i));
    CHECK(mask(0, 0) == 1.0);
    CHECK(mask(0, 1) == 1.0);
    CHECK(mask(1, 2) == 1.0); // row 2 keeps its two best, max-symmetrization keeps (1,2)
    CHECK(mask(0, 2) == 0.0);
    CHECK(topk_row_mask(s, 5) == Tensor::ones(3, 3));
}

TEST_CASE("to_onehot basics") {
    Tensor y = to_onehot({0, 1}, 2);
    CHECK(y == Tensor(2, 2, {1, 0, 0, 1}));
    CHECK_THROWS_AS(to_onehot({2}, 2), DomainError);

    Tensor big = to_onehot({1, 0, 2, 1}, 3);
    Tensor gram = matmul(big, transpose(big));
    for (std::size_t i = 0; i < 4; ++i) CHECK(gram(i, i) == 1.0);
}
