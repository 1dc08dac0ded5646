#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "doagc/autodiff.hpp"
#include "doagc/clustering.hpp"
#include "doagc/graph.hpp"
#include "doagc/metrics.hpp"

namespace doagc {

enum class LossKind { Bce, Mse };

struct TrainConfig {
    int epochs = 200;
    double lr = 1e-3;
    int order = 3;
    double rho = 1.0;
    double mask_rate = 0.3;
    double w_init = 0.5;
    double lambda_nrec = 1.0;
    int hidden_dim = 256;
    int embed_dim = 64;
    int kmeans_interval = 1;
    std::uint64_t seed = 42;
    LossKind loss = LossKind::Bce;
    bool use_rec_loss = true;
    bool use_nrec_loss = true;
    bool use_s = true;
    bool use_a = true;
    std::size_t topk = 0; // 0 keeps S dense
    int kmeans_n_init = 10;
    int kmeans_max_iter = 300;
    double kmeans_tol = 1e-4;
    bool normalize_h_for_kmeans = false;

    void validate() const;
};

struct Layer {
    Tensor w;
    Tensor b; // 1 x fan_out row vector
};

// Two-layer encoder (d -> hidden -> d_Z) and decoder (d_Z -> hidden -> d).
struct ViewParams {
    Layer enc1, enc2, dec1, dec2;
};

struct ModelParams {
    std::vector<ViewParams> views;

    static ModelParams init(std::size_t n_views, std::size_t d, std::size_t hidden,
                            std::size_t d_z, std::mt19937_64& rng);

    // Flat parameter list in a fixed traversal order; gradients and optimizer
    // moments are aligned positionally with this order.
    std::vector<Tensor*> tensors();
    std::vector<const Tensor*> tensors() const;
};

struct MaskResult {
    Tensor x_tilde;
    Tensor mask; // 1 keeps the entry, 0 zeroes it
};

// Zeroes each entry independently with probability mask_rate.
MaskResult mask_features(const Tensor& x, double mask_rate, std::mt19937_64& rng);

struct Fusion {
    Tensor h;
    std::vector<double> alphas;
};

// Consensus embedding H = sum_v alpha_v * h_v. Without a previous consensus
// every alpha is 1; otherwise alpha_v = (eva_v / max eva)^rho where eva_v is
// the mean per-node cosine between h_v and the previous H.
Fusion fuse_views(const std::vector<Tensor>& hs, const Tensor* h_prev, double rho);

// Value-level forward helpers (the training loop uses the tape equivalents).
Tensor encode(const ViewParams& p, const Tensor& x);
Tensor decode(const ViewParams& p, const Tensor& z, LossKind kind);
double reconstruction_loss(const Tensor& x_hat, const Tensor& x, LossKind kind);
double noise_recovery_loss(const Adjacency& a_hat, const Tensor& x_tilde, const Tensor& x,
                           int order, LossKind kind);

// One training step's computation graph, shared by train() and the
// finite-difference checks.
struct ViewGraph {
    Var z, x_hat, s, a_hat, h;
    Var loss_rec, loss_nrec;
};

struct ForwardGraph {
    Var total;              // 1x1
    Var loss_rec, loss_nrec; // 1x1 sums over views (zero tensors when disabled)
    std::vector<ViewGraph> views;
    std::vector<Var> param_vars; // aligned with ModelParams::tensors()
};

ForwardGraph build_forward(Tape& tape, const MultiViewGraph& g, const ModelParams& params,
                           const std::vector<Tensor>& x_tilde, const std::vector<double>& w,
                           const TrainConfig& cfg);

// Total loss for a fixed mask and fixed view weights; the probe the
// finite-difference oracle re-evaluates around perturbed parameters.
double eval_total_loss(const MultiViewGraph& g, const ModelParams& params,
                       const std::vector<Tensor>& x_tilde, const std::vector<double>& w,
                       const TrainConfig& cfg);

struct EpochRecord {
    int epoch = 0;
    double loss_rec = 0.0;
    double loss_nrec = 0.0;
    std::vector<double> w; // weight used during this epoch's forward pass
    std::optional<MetricsBundle> metrics;
};

using TrainTrace = std::vector<EpochRecord>;

struct HomophilyRow {
    double a = 0.0;
    double s = 0.0;
    double a_hat = 0.0;
};

struct HomophilyReport {
    bool has_true = false;
    std::vector<HomophilyRow> vs_true;   // per view, empty unless has_true
    std::vector<HomophilyRow> vs_pseudo; // per view, against final pseudo-labels
};

struct TrainResult {
    ModelParams params;
    std::vector<ViewState> states; // final-epoch per-view state
    Tensor h;                      // final consensus embedding
    std::vector<double> final_w;   // weights after the last pseudo-label update
    ClusterResult clusters;
    TrainTrace trace;
    std::optional<MetricsBundle> final_metrics;
    HomophilyReport homophily;
};

TrainResult train(const MultiViewGraph& g, int k, const TrainConfig& cfg);

HomophilyReport homophily_report(const MultiViewGraph& g, const std::vector<ViewState>& states,
                                 const Tensor& pseudo_onehot);

} // namespace doagc
