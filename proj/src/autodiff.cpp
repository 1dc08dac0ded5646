#include "doagc/autodiff.hpp"

#include <cmath>
#include <string>

namespace doagc {

const Tensor& Var::value() const { return tape_->value(*this); }

Var Tape::push(Node n) {
    nodes_.push_back(std::move(n));
    return Var(this, static_cast<int>(nodes_.size()) - 1);
}

void Tape::check_owned(Var v, const char* op) const {
    if (v.tape_ != this || v.id_ < 0 || v.id_ >= static_cast<int>(nodes_.size())) {
        throw ContractError(std::string(op) + ": Var does not belong to this tape");
    }
}

Var Tape::input(Tensor value) { return push({Op::Leaf, -1, -1, 0.0, std::move(value)}); }

Var Tape::matmul(Var a, Var b) {
    check_owned(a, "matmul");
    check_owned(b, "matmul");
    return push({Op::MatMul, a.id(), b.id(), 0.0, doagc::matmul(value(a), value(b))});
}

Var Tape::transpose(Var a) {
    check_owned(a, "transpose");
    return push({Op::Transpose, a.id(), -1, 0.0, doagc::transpose(value(a))});
}

Var Tape::add(Var a, Var b) {
    check_owned(a, "add");
    check_owned(b, "add");
    return push({Op::Add, a.id(), b.id(), 0.0, doagc::add(value(a), value(b))});
}

Var Tape::sub(Var a, Var b) {
    check_owned(a, "sub");
    check_owned(b, "sub");
    return push({Op::Sub, a.id(), b.id(), 0.0, doagc::sub(value(a), value(b))});
}

Var Tape::mul(Var a, Var b) {
    check_owned(a, "mul");
    check_owned(b, "mul");
    return push({Op::Mul, a.id(), b.id(), 0.0, doagc::hadamard(value(a), value(b))});
}

Var Tape::relu(Var a) {
    check_owned(a, "relu");
    return push({Op::Relu, a.id(), -1, 0.0, doagc::relu(value(a))});
}

Var Tape::sigmoid(Var a) {
    check_owned(a, "sigmoid");
    return push({Op::Sigmoid, a.id(), -1, 0.0, doagc::sigmoid(value(a))});
}

Var Tape::log_safe(Var a) {
    check_owned(a, "log_safe");
    return push({Op::LogSafe, a.id(), -1, 0.0, doagc::log_safe(value(a))});
}

Var Tape::scale(Var a, double c) {
    check_owned(a, "scale");
    return push({Op::Scale, a.id(), -1, c, doagc::scale(value(a), c)});
}

Var Tape::row_l2_normalize(Var a) {
    check_owned(a, "row_l2_normalize");
    return push({Op::RowL2Normalize, a.id(), -1, 0.0, doagc::row_l2_normalize(value(a))});
}

Var Tape::row_sum_normalize(Var a) {
    check_owned(a, "row_sum_normalize");
    return push({Op::RowSumNormalize, a.id(), -1, 0.0, doagc::row_sum_normalize(value(a))});
}

Var Tape::sum(Var a) {
    check_owned(a, "sum");
    Tensor s(1, 1);
    s(0, 0) = value(a).sum();
    return push({Op::Sum, a.id(), -1, 0.0, std::move(s)});
}

namespace {

void accumulate(Tensor& dst, const Tensor& src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst.data()[i] += src.data()[i];
}

} // namespace

void Tape::backward(Var loss) {
    check_owned(loss, "backward");
    const Tensor& lv = value(loss);
    if (lv.rows() != 1 || lv.cols() != 1) {
        throw ContractError("backward: loss node must be 1x1, got " + std::to_string(lv.rows()) +
                            "x" + std::to_string(lv.cols()));
    }

    adjoints_.assign(nodes_.size(), Tensor());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        adjoints_[i] = Tensor::zeros(nodes_[i].value.rows(), nodes_[i].value.cols());
    }
    adjoints_[loss.id()](0, 0) = 1.0;

    // nodes the loss cannot reach keep their zero adjoint and are skipped
    std::vector<char> needed(nodes_.size(), 0);
    needed[loss.id()] = 1;
    for (int id = loss.id(); id >= 0; --id) {
        if (!needed[id]) continue;
        if (nodes_[id].a >= 0) needed[nodes_[id].a] = 1;
        if (nodes_[id].b >= 0) needed[nodes_[id].b] = 1;
    }

    for (int id = loss.id(); id >= 0; --id) {
        if (!needed[id]) continue;
        const Node& n = nodes_[id];
        const Tensor& gy = adjoints_[id];
        switch (n.op) {
            case Op::Leaf:
                break;
            case Op::MatMul: {
                // dA = gy * B^T, dB = A^T * gy
                accumulate(adjoints_[n.a], doagc::matmul(gy, doagc::transpose(nodes_[n.b].value)));
                accumulate(adjoints_[n.b], doagc::matmul(doagc::transpose(nodes_[n.a].value), gy));
                break;
            }
            case Op::Transpose:
                accumulate(adjoints_[n.a], doagc::transpose(gy));
                break;
            case Op::Add:
                accumulate(adjoints_[n.a], gy);
                accumulate(adjoints_[n.b], gy);
                break;
            case Op::Sub:
                accumulate(adjoints_[n.a], gy);
                accumulate(adjoints_[n.b], doagc::scale(gy, -1.0));
                break;
            case Op::Mul:
                accumulate(adjoints_[n.a], doagc::hadamard(gy, nodes_[n.b].value));
                accumulate(adjoints_[n.b], doagc::hadamard(gy, nodes_[n.a].value));
                break;
            case Op::Relu: {
                const Tensor& x = nodes_[n.a].value;
                Tensor g(x.rows(), x.cols());
                for (std::size_t i = 0; i < x.size(); ++i) {
                    g.data()[i] = x.data()[i] > 0.0 ? gy.data()[i] : 0.0;
                }
                accumulate(adjoints_[n.a], g);
                break;
            }
            case Op::Sigmoid: {
                const Tensor& s = n.value;
                Tensor g(s.rows(), s.cols());
                for (std::size_t i = 0; i < s.size(); ++i) {
                    const double sv = s.data()[i];
                    g.data()[i] = gy.data()[i] * sv * (1.0 - sv);
                }
                accumulate(adjoints_[n.a], g);
                break;
            }
            case Op::LogSafe: {
                // d/dx log(max(x, eps)) = 1/x above the floor, 0 below it
                const Tensor& x = nodes_[n.a].value;
                Tensor g(x.rows(), x.cols());
                for (std::size_t i = 0; i < x.size(); ++i) {
                    g.data()[i] = x.data()[i] > kEpsLog ? gy.data()[i] / x.data()[i] : 0.0;
                }
                accumulate(adjoints_[n.a], g);
                break;
            }
            case Op::Scale:
                accumulate(adjoints_[n.a], doagc::scale(gy, n.c));
                break;
            case Op::RowL2Normalize: {
                const Tensor& x = nodes_[n.a].value;
                const Tensor& y = n.value;
                Tensor g(x.rows(), x.cols());
                for (std::size_t i = 0; i < x.rows(); ++i) {
                    double ss = 0.0;
                    for (std::size_t j = 0; j < x.cols(); ++j) ss += x(i, j) * x(i, j);
                    const double norm = std::sqrt(ss);
                    if (norm > kEpsNorm) {
                        double dot = 0.0;
                        for (std::size_t j = 0; j < x.cols(); ++j) dot += gy(i, j) * y(i, j);
                        for (std::size_t j = 0; j < x.cols(); ++j) {
                            g(i, j) = (gy(i, j) - dot * y(i, j)) / norm;
                        }
                    } else {
                        // clamped rows divide by the constant eps
                        for (std::size_t j = 0; j < x.cols(); ++j) g(i, j) = gy(i, j) / kEpsNorm;
                    }
                }
                accumulate(adjoints_[n.a], g);
                break;
            }
            case Op::RowSumNormalize: {
                const Tensor& x = nodes_[n.a].value;
                const Tensor& y = n.value;
                Tensor g(x.rows(), x.cols());
                for (std::size_t i = 0; i < x.rows(); ++i) {
                    double rs = 0.0;
                    for (std::size_t j = 0; j < x.cols(); ++j) rs += x(i, j);
                    if (rs > kEpsNorm) {
                        double dot = 0.0;
                        for (std::size_t j = 0; j < x.cols(); ++j) dot += gy(i, j) * y(i, j);
                        for (std::size_t j = 0; j < x.cols(); ++j) {
                            g(i, j) = (gy(i, j) - dot) / rs;
                        }
                    } else {
                        for (std::size_t j = 0; j < x.cols(); ++j) g(i, j) = gy(i, j) / kEpsNorm;
                    }
                }
                accumulate(adjoints_[n.a], g);
                break;
            }
            case Op::Sum: {
                const double gs = gy(0, 0);
                Tensor& ga = adjoints_[n.a];
                for (std::size_t i = 0; i < ga.size(); ++i) ga.data()[i] += gs;
                break;
            }
        }
    }
}

void Adam::step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads) {
    if (params.size() != grads.size()) {
        throw ShapeError("adam: " + std::to_string(params.size()) + " params vs " +
                         std::to_string(grads.size()) + " grads");
    }
    if (m_.empty()) {
        for (const Tensor* p : params) {
            m_.push_back(Tensor::zeros(p->rows(), p->cols()));
            v_.push_back(Tensor::zeros(p->rows(), p->cols()));
        }
    }
    if (m_.size() != params.size()) {
        throw ShapeError("adam: parameter list size changed between steps");
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t p = 0; p < params.size(); ++p) {
        Tensor& theta = *params[p];
        const Tensor& g = *grads[p];
        if (!theta.same_shape(g) || !theta.same_shape(m_[p])) {
            throw ShapeError("adam: gradient shape mismatch at parameter " + std::to_string(p));
        }
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double gi = g.data()[i];
            double& mi = m_[p].data()[i];
            double& vi = v_[p].data()[i];
            mi = beta1_ * mi + (1.0 - beta1_) * gi;
            vi = beta2_ * vi + (1.0 - beta2_) * gi * gi;
            const double mhat = mi / bc1;
            const double vhat = vi / bc2;
            theta.data()[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    }
}

} // namespace doagc
