#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "doagc/autodiff.hpp"
#include "oracles.hpp"

using namespace doagc;

namespace {

// FD check of one tape expression: loss = sum(weight .* expr(inputs)).
// The random weight makes transposition mistakes visible.
double check_primitive(const std::function<Var(Tape&, std::vector<Var>&)>& build,
                       std::vector<Tensor> inputs, std::mt19937_64& rng) {
    Tape tape;
    std::vector<Var> vars;
    for (const Tensor& t : inputs) vars.push_back(tape.input(t));
    Var expr = build(tape, vars);
    Tensor weight = oracle::random_tensor(expr.value().rows(), expr.value().cols(), rng);
    Var loss = tape.sum(tape.mul(tape.input(weight), expr));
    tape.backward(loss);

    double worst = 0.0;
    for (std::size_t which = 0; which < inputs.size(); ++which) {
        auto eval = [&]() {
            Tape t2;
            std::vector<Var> vs;
            for (const Tensor& t : inputs) vs.push_back(t2.input(t));
            Var e = build(t2, vs);
            return t2.sum(t2.mul(t2.input(weight), e)).value()(0, 0);
        };
        Tensor fd = oracle::fd_gradient(eval, inputs[which]);
        worst = std::max(worst, oracle::max_rel_err(tape.grad(vars[which]), fd));
    }
    return worst;
}

} // namespace

TEST_CASE("matmul forward matches hand arithmetic") {
    Tape t;
    Var m = t.input(Tensor(2, 2, {5, 6, 7, 8}));
    Var eye = t.input(Tensor::identity(2));
    CHECK(t.value(t.matmul(eye, m)) == m.value());

    Var a = t.input(Tensor(1, 2, {1, 2}));
    Var b = t.input(Tensor(2, 1, {3, 4}));
    CHECK(t.value(t.matmul(a, b))(0, 0) == doctest::Approx(11.0));
}

TEST_CASE("matmul rejects mismatched inner dimensions") {
    Tape t;
    Var a = t.input(Tensor(2, 3));
    Var b = t.input(Tensor(2, 3));
    CHECK_THROWS_AS(t.matmul(a, b), ShapeError);
}

TEST_CASE("matmul adjoints match finite differences on random 5x4 * 4x3") {
    std::mt19937_64 rng(7);
    Tensor a = oracle::random_tensor(5, 4, rng);
    Tensor b = oracle::random_tensor(4, 3, rng);
    const double err = check_primitive(
        [](Tape& t, std::vector<Var>& v) { return t.matmul(v[0], v[1]); }, {a, b}, rng);
    CHECK(err < 1e-6);
}

TEST_CASE("elementwise forward values") {
    Tape t;
    Var x = t.input(Tensor(1, 3, {-1, 0, 2}));
    const Tensor& r = t.value(t.relu(x));
    CHECK(r(0, 0) == 0.0);
    CHECK(r(0, 1) == 0.0);
    CHECK(r(0, 2) == 2.0);

    Var z = t.input(Tensor(1, 1, {0}));
    CHECK(t.value(t.sigmoid(z))(0, 0) == doctest::Approx(0.5));
    CHECK(t.value(t.log_safe(t.relu(z)))(0, 0) == doctest::Approx(std::log(1e-12)));

    Var p = t.input(Tensor(1, 2, {1, 2}));
    Var q = t.input(Tensor(1, 2, {10, 20}));
    CHECK(t.value(t.add(p, q))(0, 1) == 22.0);
    CHECK(t.value(t.sub(p, q))(0, 0) == -9.0);
    CHECK(t.value(t.mul(p, q))(0, 1) == 40.0);
    CHECK(t.value(t.scale(p, -2.0))(0, 0) == -2.0);

    Var bad = t.input(Tensor(2, 1));
    CHECK_THROWS_AS(t.add(p, bad), ShapeError);
}

TEST_CASE("every differentiable primitive agrees with central finite differences") {
    std::mt19937_64 rng(11);
    auto rnd = [&](std::size_t r, std::size_t c) { return oracle::random_tensor(r, c, rng); };

    CHECK(check_primitive([](Tape& t, std::vector<Var>& v) { return t.add(v[0], v[1]); },
                          {rnd(3, 4), rnd(3, 4)}, rng) < 1e-6);
    CHECK(check_primitive([](Tape& t, std::vector<Var>& v) { return t.sub(v[0], v[1]); },
                          {rnd(3, 4), rnd(3, 4)}, rng) < 1e-6);
    CHECK(check_primitive([](Tape& t, std::vector<Var>& v) { return t.mul(v[0], v[1]); },
                          {rnd(3, 4), rnd(3, 4)}, rng) < 1e-6);
    CHECK(check_primitive([](Tape& t, std::vector<Var>& v) { return t.transpose(v[0]); },
                          {rnd(3, 5)}, rng) < 1e-6);
    CHECK(check_primitive([](Tape& t, std::vector<Var>& v) { return t.scale(v[0], -1.7); },
                          {rnd(3, 4)}, rng) < 1e-6);
    CHECK(check_primitive([](Tape& t, std::vector<Var>& v) { return t.sigmoid(v[0]); },
                          {rnd(3, 4)}, rng) < 1e-6);
    CHECK(check_primitive([](Tape& t, std::vector<Var>& v) { return t.relu(v[0]); },
                          {oracle::random_tensor_away_from_zero(3, 4, rng)}, rng) < 1e-6);
    CHECK(check_primitive([](Tape& t, std::vector<Var>& v) { return t.log_safe(v[0]); },
                          {oracle::random_tensor(3, 4, rng, 0.1, 1.0)}, rng) < 1e-6);
    CHECK(check_primitive([](Tape& t, std::vector<Var>& v) { return t.row_l2_normalize(v[0]); },
                          {oracle::random_tensor_away_from_zero(4, 3, rng)}, rng) < 1e-6);
    CHECK(check_primitive([](Tape& t, std::vector<Var>& v) { return t.row_sum_normalize(v[0]); },
                          {oracle::random_tensor(4, 3, rng, 0.1, 1.0)}, rng) < 1e-6);
    CHECK(check_primitive([](Tape& t, std::vector<Var>& v) { return t.sum(v[0]); },
                          {rnd(3, 4)}, rng) < 1e-6);
}

TEST_CASE("row_l2_normalize values") {
    Tape t;
    const Tensor& y = t.value(t.row_l2_normalize(t.input(Tensor(1, 2, {3, 4}))));
    CHECK(y(0, 0) == doctest::Approx(0.6));
    CHECK(y(0, 1) == doctest::Approx(0.8));

    const Tensor& z = t.value(t.row_l2_normalize(t.input(Tensor(1, 2, {0, 0}))));
    CHECK(z(0, 0) == 0.0);
    CHECK(z(0, 1) == 0.0);

    std::mt19937_64 rng(3);
    Tensor r = oracle::random_tensor(6, 3, rng);
    Tensor rn = row_l2_normalize(r);
    for (std::size_t i = 0; i < rn.rows(); ++i) {
        double nn = 0.0;
        for (std::size_t j = 0; j < rn.cols(); ++j) nn += rn(i, j) * rn(i, j);
        CHECK(std::abs(std::sqrt(nn) - 1.0) < 1e-12);
    }
}

TEST_CASE("row_sum_normalize values and domain checks") {
    Tensor y = row_sum_normalize(Tensor(2, 2, {2, 2, 0, 4}));
    CHECK(y(0, 0) == doctest::Approx(0.5));
    CHECK(y(0, 1) == doctest::Approx(0.5));
    CHECK(y(1, 0) == 0.0);
    CHECK(y(1, 1) == doctest::Approx(1.0));

    CHECK(row_sum_normalize(Tensor::identity(4)) == Tensor::identity(4));
    CHECK_THROWS_AS(row_sum_normalize(Tensor(1, 2, {-1, 2})), DomainError);

    std::mt19937_64 rng(5);
    Tensor r = oracle::random_tensor(8, 5, rng, 0.0, 1.0);
    r(2, 0) = 3.0; // keep one row clearly positive
    Tensor rn = row_sum_normalize(r);
    for (std::size_t i = 0; i < rn.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < rn.cols(); ++j) s += rn(i, j);
        CHECK(std::abs(s - 1.0) < 1e-12);
    }
}

TEST_CASE("backward on linear and quadratic reductions") {
    Tape t;
    std::mt19937_64 rng(13);
    Tensor w = oracle::random_tensor(3, 4, rng);
    Var wv = t.input(w);
    t.backward(t.sum(wv));
    CHECK(t.grad(wv) == Tensor::ones(3, 4));

    Tape t2;
    Var wv2 = t2.input(w);
    t2.backward(t2.sum(t2.mul(wv2, wv2)));
    CHECK(oracle::max_rel_err(t2.grad(wv2), scale(w, 2.0)) < 1e-12);
}

TEST_CASE("backward rejects non-scalar loss and leaves forward values intact") {
    Tape t;
    Var a = t.input(Tensor(2, 2, {1, 2, 3, 4}));
    Var y = t.relu(a);
    CHECK_THROWS_AS(t.backward(y), ContractError);

    Var loss = t.sum(y);
    const Tensor before = t.value(y);
    t.backward(loss);
    CHECK(t.value(y) == before);
}

TEST_CASE("nodes unreachable from the loss keep zero adjoints") {
    Tape t;
    Var a = t.input(Tensor(1, 2, {1, 2}));
    Var b = t.input(Tensor(1, 2, {5, 5}));
    Var orphan = t.mul(b, b);
    Var loss = t.sum(a);
    t.backward(loss);
    CHECK(t.grad(orphan) == Tensor::zeros(1, 2));
    CHECK(t.grad(b) == Tensor::zeros(1, 2));
    CHECK(t.grad(a) == Tensor::ones(1, 2));
}

TEST_CASE("forward evaluation is pure: same tape twice gives bit-identical values") {
    std::mt19937_64 rng(17);
    Tensor a = oracle::random_tensor(6, 6, rng);
    Tensor b = oracle::random_tensor(6, 6, rng);
    auto run = [&]() {
        Tape t;
        Var s = t.sigmoid(t.matmul(t.input(a), t.input(b)));
        return t.value(t.row_sum_normalize(t.relu(s)));
    };
    CHECK(run() == run());
}

TEST_CASE("adam: zero gradient is a fixed point") {
    Tensor theta(2, 2, {1, 2, 3, 4});
    const Tensor before = theta;
    Tensor zero(2, 2);
    Adam opt(0.1);
    opt.step({&theta}, {&zero});
    opt.step({&theta}, {&zero});
    CHECK(theta == before);
}

TEST_CASE("adam: first bias-corrected step has magnitude ~= lr") {
    Tensor theta(1, 1, {0.0});
    Tensor g(1, 1, {1.0});
    Adam opt(0.1, 0.9, 0.999, 1e-8);
    opt.step({&theta}, {&g});
    CHECK(theta(0, 0) == doctest::Approx(-0.1).epsilon(1e-6));
}

TEST_CASE("adam: successive steps reproduce the scalar reference recurrence") {
    Tensor theta(1, 1, {0.5});
    Adam opt(0.05, 0.9, 0.999, 1e-8);
    oracle::ScalarAdam ref{0.05, 0.9, 0.999, 1e-8};
    double ref_theta = 0.5;
    const double gs[] = {1.0, -0.3, 0.7, 0.01, -2.0};
    for (double gval : gs) {
        Tensor g(1, 1, {gval});
        opt.step({&theta}, {&g});
        ref_theta += ref.update(gval);
        CHECK(theta(0, 0) == doctest::Approx(ref_theta).epsilon(1e-12));
    }
}

TEST_CASE("adam rejects mismatched gradient shapes") {
    Tensor theta(2, 2);
    Tensor g(1, 2);
    Adam opt;
    CHECK_THROWS_AS(opt.step({&theta}, {&g}), ShapeError);
}
