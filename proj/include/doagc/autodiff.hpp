#pragma once

#include <cstdint>
#include <vector>

#include "doagc/tensor.hpp"

namespace doagc {

class Tape;

// Handle to a node on a tape. Cheap to copy; valid as long as the tape lives.
class Var {
public:
    Var() = default;
    int id() const { return id_; }
    const Tensor& value() const;

private:
    friend class Tape;
    Var(Tape* tape, int id) : tape_(tape), id_(id) {}
    Tape* tape_ = nullptr;
    int id_ = -1;
};

// Reverse-mode tape over dense matrices. Nodes are recorded in topological
// order (inputs always precede users); backward() does one reverse sweep and
// leaves all cached forward values untouched. One tape per training step,
// single-threaded mutation.
class Tape {
public:
    enum class Op : std::uint8_t {
        Leaf,
        MatMul,
        Transpose,
        Add,
        Sub,
        Mul,
        Relu,
        Sigmoid,
        LogSafe,
        Scale,
        RowL2Normalize,
        RowSumNormalize,
        Sum,
    };

    Var input(Tensor value);

    Var matmul(Var a, Var b);
    Var transpose(Var a);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var relu(Var a);
    Var sigmoid(Var a);
    Var log_safe(Var a);
    Var scale(Var a, double c);
    Var row_l2_normalize(Var a);
    Var row_sum_normalize(Var a);
    // Full reduction to a 1x1 tensor.
    Var sum(Var a);

    // Seeds the 1x1 loss node with 1 and accumulates adjoints for every node
    // on the tape; nodes the loss does not reach keep a zero adjoint.
    void backward(Var loss);

    const Tensor& value(Var v) const { return nodes_[v.id()].value; }
    const Tensor& value(int id) const { return nodes_[id].value; }
    // Valid after backward().
    const Tensor& grad(Var v) const { return adjoints_[v.id()]; }
    const Tensor& grad(int id) const { return adjoints_[id]; }

    std::size_t size() const { return nodes_.size(); }

private:
    struct Node {
        Op op{Op::Leaf};
        int a = -1;
        int b = -1;
        double c = 0.0; // Scale factor
        Tensor value;
    };

    Var push(Node n);
    void check_owned(Var v, const char* op) const;

    std::vector<Node> nodes_;
    std::vector<Tensor> adjoints_;
};

// Standard Adam with bias correction. Moment buffers are lazily shaped from
// the first step's parameter list and keyed by position, so the parameter
// order must stay fixed across steps.
class Adam {
public:
    Adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads);

    long long steps_taken() const { return t_; }
    double learning_rate() const { return lr_; }

private:
    double lr_, beta1_, beta2_, eps_;
    long long t_ = 0;
    std::vector<Tensor> m_, v_;
};

} // namespace doagc
