#include "doagc/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace doagc {

void TrainConfig::validate() const {
    if (epochs < 1) throw ContractError("config: epochs must be >= 1");
    if (order < 1) throw ContractError("config: order must be >= 1");
    if (!(mask_rate >= 0.0 && mask_rate < 1.0)) {
        throw ContractError("config: mask_rate must lie in [0,1)");
    }
    if (!(w_init >= 0.0 && w_init <= 1.0)) throw ContractError("config: w_init must lie in [0,1]");
    if (!(lambda_nrec >= 0.0)) throw ContractError("config: lambda_nrec must be >= 0");
    if (!(rho >= 0.0)) throw ContractError("config: rho must be >= 0");
    if (!(lr > 0.0)) throw ContractError("config: lr must be > 0");
    if (hidden_dim < 1 || embed_dim < 1) throw ContractError("config: layer dims must be >= 1");
    if (kmeans_interval < 1) throw ContractError("config: kmeans_interval must be >= 1");
    if (!use_s && !use_a) {
        throw ContractError("config: use_s and use_a cannot both be off (A-hat would be empty)");
    }
}

ModelParams ModelParams::init(std::size_t n_views, std::size_t d, std::size_t hidden,
                              std::size_t d_z, std::mt19937_64& rng) {
    auto glorot = [&rng](std::size_t fan_in, std::size_t fan_out) {
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        std::uniform_real_distribution<double> u(-limit, limit);
        Tensor w(fan_in, fan_out);
        for (double& v : w.values()) v = u(rng);
        return w;
    };
    ModelParams p;
    for (std::size_t v = 0; v < n_views; ++v) {
        ViewParams vp;
        vp.enc1 = {glorot(d, hidden), Tensor::zeros(1, hidden)};
        vp.enc2 = {glorot(hidden, d_z), Tensor::zeros(1, d_z)};
        vp.dec1 = {glorot(d_z, hidden), Tensor::zeros(1, hidden)};
        vp.dec2 = {glorot(hidden, d), Tensor::zeros(1, d)};
        p.views.push_back(std::move(vp));
    }
    return p;
}

std::vector<Tensor*> ModelParams::tensors() {
    std::vector<Tensor*> out;
    for (ViewParams& v : views) {
        for (Layer* l : {&v.enc1, &v.enc2, &v.dec1, &v.dec2}) {
            out.push_back(&l->w);
            out.push_back(&l->b);
        }
    }
    return out;
}

std::vector<const Tensor*> ModelParams::tensors() const {
    std::vector<const Tensor*> out;
    for (const ViewParams& v : views) {
        for (const Layer* l : {&v.enc1, &v.enc2, &v.dec1, &v.dec2}) {
            out.push_back(&l->w);
            out.push_back(&l->b);
        }
    }
    return out;
}

MaskResult mask_features(const Tensor& x, double mask_rate, std::mt19937_64& rng) {
    if (!(mask_rate >= 0.0 && mask_rate < 1.0)) {
        throw ContractError("mask_features: mask_rate must lie in [0,1)");
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MaskResult r{Tensor(x.rows(), x.cols()), Tensor(x.rows(), x.cols())};
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double keep = u(rng) < mask_rate ? 0.0 : 1.0;
        r.mask.data()[i] = keep;
        r.x_tilde.data()[i] = keep * x.data()[i];
    }
    return r;
}

Fusion fuse_views(const std::vector<Tensor>& hs, const Tensor* h_prev, double rho) {
    if (hs.empty()) throw ContractError("fuse_views: empty view list");
    const std::size_t n = hs[0].rows(), d = hs[0].cols();
    for (const Tensor& h : hs) {
        if (h.rows() != n || h.cols() != d) throw ShapeError("fuse_views: view embedding shapes differ");
    }

    std::vector<double> alphas(hs.size(), 1.0);
    if (h_prev != nullptr) {
        if (h_prev->rows() != n || h_prev->cols() != d) {
            throw ShapeError("fuse_views: previous consensus shape differs");
        }
        std::vector<double> eva(hs.size(), 0.0);
        for (std::size_t v = 0; v < hs.size(); ++v) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double dot = 0.0, na = 0.0, nb = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    dot += hs[v](i, j) * (*h_prev)(i, j);
                    na += hs[v](i, j) * hs[v](i, j);
                    nb += (*h_prev)(i, j) * (*h_prev)(i, j);
                }
                acc += dot / std::max(std::sqrt(na) * std::sqrt(nb), kEpsNorm);
            }
            eva[v] = std::clamp(acc / static_cast<double>(n), kEpsNorm, 1.0);
        }
        const double top = *std::max_element(eva.begin(), eva.end());
        for (std::size_t v = 0; v < hs.size(); ++v) alphas[v] = std::pow(eva[v] / top, rho);
    }

    Tensor h(n, d);
    for (std::size_t v = 0; v < hs.size(); ++v) {
        for (std::size_t i = 0; i < h.size(); ++i) h.data()[i] += alphas[v] * hs[v].data()[i];
    }
    return {std::move(h), std::move(alphas)};
}

namespace {

Var affine(Tape& t, Var x, Var w, Var b, Var ones_col) {
    return t.add(t.matmul(x, w), t.matmul(ones_col, b));
}

// -(1/size) * sum(x*log(p) + (1-x)*log(1-p)); targets enter as constants.
Var bce_loss(Tape& t, Var pred, const Tensor& target) {
    const double inv = 1.0 / static_cast<double>(target.size());
    Var xc = t.input(target);
    Var one_minus_x = t.input(sub(Tensor::ones(target.rows(), target.cols()), target));
    Var ones = t.input(Tensor::ones(target.rows(), target.cols()));
    Var pos = t.mul(xc, t.log_safe(pred));
    Var neg = t.mul(one_minus_x, t.log_safe(t.sub(ones, pred)));
    return t.scale(t.sum(t.add(pos, neg)), -inv);
}

Var mse_loss(Tape& t, Var pred, const Tensor& target) {
    const double inv = 1.0 / static_cast<double>(target.size());
    Var d = t.sub(pred, t.input(target));
    return t.scale(t.sum(t.mul(d, d)), inv);
}

Var pick_loss(Tape& t, Var pred, const Tensor& target, LossKind kind) {
    return kind == LossKind::Bce ? bce_loss(t, pred, target) : mse_loss(t, pred, target);
}

void check_bce_targets(const Tensor& x) {
    if (x.min() < 0.0 || x.max() > 1.0) {
        throw DomainError("bce loss: targets must lie in [0,1]; scale the features or use mse");
    }
}

} // namespace

ForwardGraph build_forward(Tape& tape, const MultiViewGraph& g, const ModelParams& params,
                           const std::vector<Tensor>& x_tilde, const std::vector<double>& w,
                           const TrainConfig& cfg) {
    const std::size_t n_views = g.num_views();
    if (params.views.size() != n_views || x_tilde.size() != n_views || w.size() != n_views) {
        throw ShapeError("build_forward: per-view argument counts disagree");
    }
    if (cfg.loss == LossKind::Bce) check_bce_targets(g.features);

    const std::size_t n = g.n;
    ForwardGraph fg;
    Var xc = tape.input(g.features);
    Var ones_col = tape.input(Tensor::ones(n, 1));

    std::vector<Var> rec_terms, nrec_terms;
    for (std::size_t v = 0; v < n_views; ++v) {
        const ViewParams& vp = params.views[v];
        ViewGraph vg;

        Var w1 = tape.input(vp.enc1.w), b1 = tape.input(vp.enc1.b);
        Var w2 = tape.input(vp.enc2.w), b2 = tape.input(vp.enc2.b);
        Var w3 = tape.input(vp.dec1.w), b3 = tape.input(vp.dec1.b);
        Var w4 = tape.input(vp.dec2.w), b4 = tape.input(vp.dec2.b);
        for (Var p : {w1, b1, w2, b2, w3, b3, w4, b4}) fg.param_vars.push_back(p);

        vg.z = affine(tape, tape.relu(affine(tape, xc, w1, b1, ones_col)), w2, b2, ones_col);
        Var pre = affine(tape, tape.relu(affine(tape, vg.z, w3, b3, ones_col)), w4, b4, ones_col);
        vg.x_hat = cfg.loss == LossKind::Bce ? tape.sigmoid(pre) : pre;
        vg.loss_rec = pick_loss(tape, vg.x_hat, g.features, cfg.loss);
        if (cfg.use_rec_loss) rec_terms.push_back(vg.loss_rec);

        if (cfg.use_s) {
            Var zn = tape.row_l2_normalize(vg.z);
            vg.s = tape.relu(tape.matmul(zn, tape.transpose(zn)));
            if (cfg.topk > 0) {
                vg.s = tape.mul(vg.s, tape.input(topk_row_mask(tape.value(vg.s), cfg.topk)));
            }
        } else {
            vg.s = tape.input(Tensor::zeros(n, n));
        }
        vg.a_hat = cfg.use_a ? tape.add(vg.s, tape.scale(tape.input(g.views[v].matrix), w[v]))
                             : vg.s;

        Var norm = tape.row_sum_normalize(vg.a_hat);
        Var xbar = tape.input(x_tilde[v]);
        for (int o = 0; o < cfg.order; ++o) xbar = tape.matmul(norm, xbar);
        if (cfg.loss == LossKind::Bce) xbar = tape.sigmoid(xbar);
        vg.loss_nrec = pick_loss(tape, xbar, g.features, cfg.loss);
        if (cfg.use_nrec_loss) nrec_terms.push_back(vg.loss_nrec);

        vg.h = vg.z;
        for (int o = 0; o < cfg.order; ++o) vg.h = tape.matmul(norm, vg.h);

        fg.views.push_back(vg);
    }

    auto sum_terms = [&tape](const std::vector<Var>& terms) {
        if (terms.empty()) return tape.input(Tensor::zeros(1, 1));
        Var acc = terms[0];
        for (std::size_t i = 1; i < terms.size(); ++i) acc = tape.add(acc, terms[i]);
        return acc;
    };
    fg.loss_rec = sum_terms(rec_terms);
    fg.loss_nrec = sum_terms(nrec_terms);
    fg.total = tape.add(fg.loss_rec, tape.scale(fg.loss_nrec, cfg.lambda_nrec));
    return fg;
}

double eval_total_loss(const MultiViewGraph& g, const ModelParams& params,
                       const std::vector<Tensor>& x_tilde, const std::vector<double>& w,
                       const TrainConfig& cfg) {
    Tape tape;
    return build_forward(tape, g, params, x_tilde, w, cfg).total.value()(0, 0);
}

Tensor encode(const ViewParams& p, const Tensor& x) {
    auto affine_v = [](const Tensor& in, const Layer& l) {
        Tensor out = matmul(in, l.w);
        for (std::size_t i = 0; i < out.rows(); ++i)
            for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += l.b(0, j);
        return out;
    };
    return affine_v(relu(affine_v(x, p.enc1)), p.enc2);
}

Tensor decode(const ViewParams& p, const Tensor& z, LossKind kind) {
    auto affine_v = [](const Tensor& in, const Layer& l) {
        Tensor out = matmul(in, l.w);
        for (std::size_t i = 0; i < out.rows(); ++i)
            for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += l.b(0, j);
        return out;
    };
    const Tensor pre = affine_v(relu(affine_v(z, p.dec1)), p.dec2);
    return kind == LossKind::Bce ? sigmoid(pre) : pre;
}

double reconstruction_loss(const Tensor& x_hat, const Tensor& x, LossKind kind) {
    if (!x_hat.same_shape(x)) throw ShapeError("reconstruction_loss: shape mismatch");
    const double inv = 1.0 / static_cast<double>(x.size());
    if (kind == LossKind::Mse) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x_hat.data()[i] - x.data()[i];
            s += d * d;
        }
        return s * inv;
    }
    check_bce_targets(x);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double p = x_hat.data()[i];
        const double t = x.data()[i];
        s += t * std::log(std::max(p, kEpsLog)) + (1.0 - t) * std::log(std::max(1.0 - p, kEpsLog));
    }
    return -s * inv;
}

double noise_recovery_loss(const Adjacency& a_hat, const Tensor& x_tilde, const Tensor& x,
                           int order, LossKind kind) {
    if (!x_tilde.same_shape(x)) throw ShapeError("noise_recovery_loss: shape mismatch");
    Tensor x_bar = aggregate(a_hat, x_tilde, order);
    if (kind == LossKind::Bce) x_bar = sigmoid(x_bar);
    return reconstruction_loss(x_bar, x, kind);
}

HomophilyReport homophily_report(const MultiViewGraph& g, const std::vector<ViewState>& states,
                                 const Tensor& pseudo_onehot) {
    HomophilyReport rep;
    rep.has_true = g.labels.has_value();
    Tensor true_onehot;
    if (rep.has_true) {
        const int k = *std::max_element(g.labels->begin(), g.labels->end()) + 1;
        true_onehot = to_onehot(*g.labels, k);
    }
    for (std::size_t v = 0; v < states.size(); ++v) {
        const ViewState& st = states[v];
        if (rep.has_true) {
            rep.vs_true.push_back({edge_homophily(g.views[v], true_onehot),
                                   weighted_homophily(st.s, true_onehot),
                                   weighted_homophily(st.a_hat.matrix, true_onehot)});
        }
        rep.vs_pseudo.push_back({edge_homophily(g.views[v], pseudo_onehot),
                                 weighted_homophily(st.s, pseudo_onehot),
                                 weighted_homophily(st.a_hat.matrix, pseudo_onehot)});
    }
    return rep;
}

TrainResult train(const MultiViewGraph& g, int k, const TrainConfig& cfg) {
    cfg.validate();
    g.validate();
    if (k < 1 || static_cast<std::size_t>(k) > g.n) {
        throw ContractError("train: cluster count k=" + std::to_string(k) +
                            " outside [1," + std::to_string(g.n) + "]");
    }

    const std::size_t n_views = g.num_views();
    std::mt19937_64 master(cfg.seed);
    std::mt19937_64 rng_init(master()), rng_mask(master()), rng_kmeans(master());

    ModelParams params = ModelParams::init(n_views, g.features.cols(), cfg.hidden_dim,
                                           cfg.embed_dim, rng_init);
    Adam opt(cfg.lr);
    std::vector<double> w(n_views, cfg.w_init);
    Tensor h_prev;
    bool have_prev = false;
    std::optional<ClusterResult> pseudo;
    std::optional<MetricsBundle> metrics;
    int last_kmeans_epoch = 0;

    TrainResult result;
    result.trace.reserve(cfg.epochs);

    auto run_kmeans = [&](const Tensor& h) {
        const Tensor& pts = cfg.normalize_h_for_kmeans ? row_l2_normalize(h) : h;
        return kmeans(pts, k, cfg.kmeans_n_init, cfg.kmeans_max_iter, cfg.kmeans_tol, rng_kmeans);
    };

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::vector<Tensor> x_tilde;
        x_tilde.reserve(n_views);
        for (std::size_t v = 0; v < n_views; ++v) {
            x_tilde.push_back(mask_features(g.features, cfg.mask_rate, rng_mask).x_tilde);
        }

        Tape tape;
        ForwardGraph fg = build_forward(tape, g, params, x_tilde, w, cfg);
        const double total = fg.total.value()(0, 0);
        if (!std::isfinite(total)) {
            throw DivergenceError("train: non-finite loss at epoch " + std::to_string(epoch));
        }

        std::vector<Tensor> hs;
        hs.reserve(n_views);
        for (const ViewGraph& vg : fg.views) hs.push_back(tape.value(vg.h));
        Fusion fusion = fuse_views(hs, have_prev ? &h_prev : nullptr, cfg.rho);

        const std::vector<double> w_used = w;
        if (epoch % cfg.kmeans_interval == 0) {
            pseudo = run_kmeans(fusion.h);
            last_kmeans_epoch = epoch;
            for (std::size_t v = 0; v < n_views; ++v) {
                w[v] = edge_homophily(g.views[v], pseudo->onehot);
            }
            if (g.labels) metrics = evaluate_clustering(pseudo->assignments, *g.labels);
        }

        result.trace.push_back({epoch, fg.loss_rec.value()(0, 0), fg.loss_nrec.value()(0, 0),
                                w_used, metrics});

        if (epoch == cfg.epochs) {
            result.states.clear();
            for (std::size_t v = 0; v < n_views; ++v) {
                const ViewGraph& vg = fg.views[v];
                result.states.push_back({tape.value(vg.z), tape.value(vg.s),
                                         Adjacency{tape.value(vg.a_hat)}, w_used[v],
                                         tape.value(vg.h), fusion.alphas[v]});
            }
        }

        tape.backward(fg.total);
        std::vector<const Tensor*> grads;
        grads.reserve(fg.param_vars.size());
        for (Var p : fg.param_vars) grads.push_back(&tape.grad(p));
        opt.step(params.tensors(), grads);

        h_prev = std::move(fusion.h);
        have_prev = true;
    }

    if (!pseudo || last_kmeans_epoch != cfg.epochs) {
        pseudo = run_kmeans(h_prev);
        if (g.labels) metrics = evaluate_clustering(pseudo->assignments, *g.labels);
        for (std::size_t v = 0; v < n_views; ++v) {
            w[v] = edge_homophily(g.views[v], pseudo->onehot);
        }
    }

    result.params = std::move(params);
    result.h = h_prev;
    result.final_w = w;
    result.clusters = *pseudo;
    result.final_metrics = metrics;
    result.homophily = homophily_report(g, result.states, pseudo->onehot);
    return result;
}

} // namespace doagc
