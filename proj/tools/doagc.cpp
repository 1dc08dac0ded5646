// Command-line front end: synthetic data generation, training, homophily
// analysis, and parameter sweeps over the DOAGC pipeline.

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "doagc/data.hpp"
#include "doagc/model.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string csv_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::vector<double> parse_csv_doubles(const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string item = text.substr(start, comma == std::string::npos ? comma : comma - start);
        if (item.empty()) throw doagc::ContractError("empty value in list '" + text + "'");
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end != item.c_str() + item.size()) {
            throw doagc::ContractError("'" + item + "' is not a number");
        }
        out.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

struct TrainFlags {
    std::string data_dir;
    int k = 0; // 0 = take from manifest
    doagc::TrainConfig cfg;
    std::string loss_name = "bce";
    bool no_rec = false, no_nrec = false, no_s = false, no_a = false;

    void attach(CLI::App* cmd, bool with_data = true) {
        if (with_data) cmd->add_option("--data", data_dir, "dataset directory")->required();
        cmd->add_option("--k", k, "cluster count (default: manifest value)");
        cmd->add_option("--epochs", cfg.epochs, "training epochs");
        cmd->add_option("--lr", cfg.lr, "Adam learning rate");
        cmd->add_option("--order", cfg.order, "aggregation order");
        cmd->add_option("--rho", cfg.rho, "view-weight sharpening exponent");
        cmd->add_option("--mask-rate", cfg.mask_rate, "feature mask probability");
        cmd->add_option("--w-init", cfg.w_init, "initial adjacency weight");
        cmd->add_option("--lambda-nrec", cfg.lambda_nrec, "noise-recovery loss weight");
        cmd->add_option("--seed", cfg.seed, "run seed");
        cmd->add_option("--hidden-dim", cfg.hidden_dim, "autoencoder hidden width");
        cmd->add_option("--embed-dim", cfg.embed_dim, "embedding width");
        cmd->add_option("--kmeans-interval", cfg.kmeans_interval, "epochs between pseudo-label refreshes");
        cmd->add_option("--topk", cfg.topk, "keep only k similarity entries per row (0 = dense)");
        cmd->add_option("--loss", loss_name, "bce or mse")->check(CLI::IsMember({"bce", "mse"}));
        cmd->add_flag("--no-rec-loss", no_rec, "drop the reconstruction loss");
        cmd->add_flag("--no-nrec-loss", no_nrec, "drop the noise-recovery loss");
        cmd->add_flag("--no-s", no_s, "drop the similarity graph from A-hat");
        cmd->add_flag("--no-a", no_a, "drop the original adjacency from A-hat");
        cmd->add_flag("--normalize-h", cfg.normalize_h_for_kmeans, "L2-normalize H before k-means");
    }

    doagc::TrainConfig final_config() const {
        doagc::TrainConfig c = cfg;
        c.loss = loss_name == "mse" ? doagc::LossKind::Mse : doagc::LossKind::Bce;
        c.use_rec_loss = !no_rec;
        c.use_nrec_loss = !no_nrec;
        c.use_s = !no_s;
        c.use_a = !no_a;
        return c;
    }
};

ordered_json config_json(const doagc::TrainConfig& c) {
    ordered_json j;
    j["epochs"] = c.epochs;
    j["lr"] = c.lr;
    j["order"] = c.order;
    j["rho"] = c.rho;
    j["mask_rate"] = c.mask_rate;
    j["w_init"] = c.w_init;
    j["lambda_nrec"] = c.lambda_nrec;
    j["hidden_dim"] = c.hidden_dim;
    j["embed_dim"] = c.embed_dim;
    j["kmeans_interval"] = c.kmeans_interval;
    j["loss"] = c.loss == doagc::LossKind::Bce ? "bce" : "mse";
    j["topk"] = c.topk;
    j["use_rec_loss"] = c.use_rec_loss;
    j["use_nrec_loss"] = c.use_nrec_loss;
    j["use_s"] = c.use_s;
    j["use_a"] = c.use_a;
    j["normalize_h"] = c.normalize_h_for_kmeans;
    return j;
}

ordered_json homophily_json(const doagc::HomophilyReport& rep) {
    ordered_json j;
    auto rows = [](const std::vector<doagc::HomophilyRow>& rows) {
        ordered_json arr = ordered_json::array();
        for (std::size_t v = 0; v < rows.size(); ++v) {
            ordered_json r;
            r["view"] = v + 1;
            r["a"] = rows[v].a;
            r["s"] = rows[v].s;
            r["a_hat"] = rows[v].a_hat;
            arr.push_back(r);
        }
        return arr;
    };
    j["true"] = rep.has_true ? rows(rep.vs_true) : ordered_json(nullptr);
    j["pseudo"] = rows(rep.vs_pseudo);
    return j;
}

void write_or_throw(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw doagc::IoError(p.string() + ": cannot open for writing");
    out << content;
    if (!out) throw doagc::IoError(p.string() + ": write failed");
}

std::string metrics_cells(const std::optional<doagc::MetricsBundle>& m) {
    if (!m) return ",,,";
    return fixed4(m->acc) + "," + fixed4(m->nmi) + "," + fixed4(m->ari) + "," + fixed4(m->f1);
}

void run_training_and_write(const doagc::Dataset& ds, int k, const doagc::TrainConfig& cfg,
                            const fs::path& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    doagc::TrainResult res = doagc::train(ds.graph, k, cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    fs::create_directories(out_dir);
    const std::size_t n_views = ds.graph.num_views();

    std::string trace = "epoch,loss_rec,loss_nrec";
    for (std::size_t v = 1; v <= n_views; ++v) trace += ",w_" + std::to_string(v);
    trace += ",acc,nmi,ari,f1\n";
    for (const doagc::EpochRecord& e : res.trace) {
        trace += std::to_string(e.epoch) + "," + num(e.loss_rec) + "," + num(e.loss_nrec);
        for (double w : e.w) trace += "," + num(w);
        trace += "," + metrics_cells(e.metrics) + "\n";
    }
    write_or_throw(out_dir / "trace.csv", trace);

    std::string emb;
    for (std::size_t i = 0; i < res.h.rows(); ++i) {
        for (std::size_t j = 0; j < res.h.cols(); ++j) {
            if (j) emb += ",";
            emb += csv_double(res.h(i, j));
        }
        emb += "\n";
    }
    write_or_throw(out_dir / "embedding.csv", emb);

    std::string assign;
    for (int a : res.clusters.assignments) assign += std::to_string(a) + "\n";
    write_or_throw(out_dir / "assignments.csv", assign);

    ordered_json j;
    j["dataset"] = ds.manifest.name;
    j["n"] = ds.graph.n;
    j["views"] = n_views;
    j["k"] = k;
    j["seed"] = cfg.seed;
    j["config"] = config_json(cfg);
    if (res.final_metrics) {
        ordered_json m;
        m["acc"] = res.final_metrics->acc;
        m["nmi"] = res.final_metrics->nmi;
        m["ari"] = res.final_metrics->ari;
        m["f1"] = res.final_metrics->f1;
        j["metrics"] = m;
    } else {
        j["metrics"] = nullptr;
    }
    j["final_w"] = res.final_w;
    ordered_json alphas = ordered_json::array();
    for (const doagc::ViewState& st : res.states) alphas.push_back(st.alpha);
    j["alphas"] = alphas;
    j["homophily"] = homophily_json(res.homophily);
    j["wall_clock_seconds"] = secs;
    write_or_throw(out_dir / "summary.json", j.dump(2) + "\n");

    if (res.final_metrics) {
        std::cout << "acc " << fixed4(res.final_metrics->acc) << "  nmi "
                  << fixed4(res.final_metrics->nmi) << "  ari " << fixed4(res.final_metrics->ari)
                  << "  f1 " << fixed4(res.final_metrics->f1) << "\n";
    }
    std::cout << "final w:";
    for (double w : res.final_w) std::cout << " " << fixed4(w);
    std::cout << "\nwrote " << (out_dir / "summary.json").string() << "\n";
}

void print_homophily_table(const std::vector<doagc::HomophilyRow>& rows, const std::string& source) {
    std::cout << "label source: " << source << "\n";
    std::cout << "view  HR(A)   HR(S)   HR(A^)\n";
    for (std::size_t v = 0; v < rows.size(); ++v) {
        std::cout << v + 1 << "     " << fixed4(rows[v].a) << "  " << fixed4(rows[v].s) << "  "
                  << fixed4(rows[v].a_hat) << "\n";
    }
}

int cmd_synth(const std::string& out, std::size_t nodes, std::size_t clusters, std::size_t views,
              const std::string& homophily_csv, std::size_t edges, std::size_t feature_dim,
              std::uint64_t seed, double separation, double noise) {
    doagc::SynthSpec spec;
    spec.n = nodes;
    spec.k = clusters;
    spec.views = views;
    spec.edges = edges;
    spec.feature_dim = feature_dim;
    spec.seed = seed;
    spec.center_separation = separation;
    spec.feature_noise = noise;
    spec.target_homophily = parse_csv_doubles(homophily_csv);
    if (spec.target_homophily.size() == 1 && views > 1) {
        spec.target_homophily.assign(views, spec.target_homophily[0]);
    }
    spec.validate();

    doagc::Dataset ds = doagc::generate_synthetic(spec, out);
    const doagc::Tensor onehot = doagc::to_onehot(*ds.graph.labels, static_cast<int>(spec.k));
    std::cout << "homophily:";
    for (const doagc::Adjacency& a : ds.graph.views) {
        std::cout << " " << fixed4(doagc::edge_homophily(a, onehot));
    }
    std::cout << "\n";
    return 0;
}

int cmd_analyze(const TrainFlags& flags, bool use_true_labels, const std::string& run_dir) {
    doagc::Dataset ds = doagc::load_dataset(flags.data_dir);
    if (!use_true_labels && run_dir.empty()) {
        throw doagc::ContractError("analyze needs --labels true or --run DIR");
    }
    if (use_true_labels && !ds.graph.labels) {
        throw doagc::ContractError("analyze: dataset has no labels file");
    }

    if (!run_dir.empty()) {
        const fs::path summary_path = fs::path(run_dir) / "summary.json";
        if (!fs::exists(summary_path)) {
            throw doagc::IoError(summary_path.string() + ": file not found (is this a run directory?)");
        }
        std::ifstream in(summary_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw doagc::IoError(summary_path.string() + ": invalid JSON (" + e.what() + ")");
        }
        const char* block = use_true_labels ? "true" : "pseudo";
        if (!j.contains("homophily") || j["homophily"][block].is_null()) {
            throw doagc::ContractError(std::string("analyze: run summary has no '") + block +
                                       "' homophily block");
        }
        std::vector<doagc::HomophilyRow> rows;
        for (const auto& r : j["homophily"][block]) {
            rows.push_back({r["a"].get<double>(), r["s"].get<double>(), r["a_hat"].get<double>()});
        }
        print_homophily_table(rows, block);
        return 0;
    }

    // no run directory: train here and report against true labels
    const int k = flags.k > 0 ? flags.k : static_cast<int>(ds.manifest.k);
    doagc::TrainResult res = doagc::train(ds.graph, k, flags.final_config());
    print_homophily_table(res.homophily.vs_true, "true");
    return 0;
}

int cmd_sweep(const TrainFlags& flags, const std::string& param, const std::string& values_csv,
              const std::string& out_dir) {
    const std::vector<double> values = parse_csv_doubles(values_csv);
    if (values.empty()) throw doagc::ContractError("sweep: empty --values list");
    if (param != "w-init" && param != "order" && param != "rho" && param != "mask-rate") {
        throw doagc::ContractError("sweep: unknown --param '" + param +
                                   "' (choose w-init, order, rho, mask-rate)");
    }

    doagc::Dataset ds = doagc::load_dataset(flags.data_dir);
    const int k = flags.k > 0 ? flags.k : static_cast<int>(ds.manifest.k);
    const std::size_t n_views = ds.graph.num_views();

    std::string csv = "value,acc,nmi,ari,f1";
    for (std::size_t v = 1; v <= n_views; ++v) csv += ",w_" + std::to_string(v);
    csv += "\n";

    for (double value : values) {
        doagc::TrainConfig cfg = flags.final_config();
        if (param == "w-init") cfg.w_init = value;
        else if (param == "order") cfg.order = static_cast<int>(value);
        else if (param == "rho") cfg.rho = value;
        else cfg.mask_rate = value;

        doagc::TrainResult res = doagc::train(ds.graph, k, cfg);
        csv += num(value) + "," + metrics_cells(res.final_metrics);
        for (double w : res.final_w) csv += "," + num(w);
        csv += "\n";
        std::cout << param << "=" << num(value);
        if (res.final_metrics) std::cout << "  acc " << fixed4(res.final_metrics->acc);
        std::cout << "  final w:";
        for (double w : res.final_w) std::cout << " " << fixed4(w);
        std::cout << "\n";
    }

    fs::create_directories(out_dir);
    write_or_throw(fs::path(out_dir) / "sweep.csv", csv);
    std::cout << "wrote " << (fs::path(out_dir) / "sweep.csv").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DOAGC: dual-optimized adaptive graph reconstruction for multi-view clustering"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a homophily-controlled synthetic dataset");
    std::string synth_out, synth_homophily;
    std::size_t synth_nodes = 300, synth_clusters = 3, synth_views = 2, synth_edges = 1200,
                synth_dim = 50;
    std::uint64_t synth_seed = 42;
    double synth_sep = 6.0, synth_noise = 1.0;
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--nodes", synth_nodes, "node count");
    synth->add_option("--clusters", synth_clusters, "class count");
    synth->add_option("--views", synth_views, "view count");
    synth->add_option("--homophily", synth_homophily, "target ratio per view, comma separated")
        ->required();
    synth->add_option("--edges", synth_edges, "undirected edges per view");
    synth->add_option("--feature-dim", synth_dim, "feature dimensionality");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--center-separation", synth_sep, "class center separation");
    synth->add_option("--feature-noise", synth_noise, "feature noise sigma");

    // train
    auto* train_cmd = app.add_subcommand("train", "train DOAGC and write run artifacts");
    TrainFlags train_flags;
    std::string train_out;
    train_flags.attach(train_cmd);
    train_cmd->add_option("--out", train_out, "run output directory")->required();

    // analyze
    auto* analyze = app.add_subcommand("analyze", "report homophily of A, S and A-hat per view");
    TrainFlags analyze_flags;
    std::string analyze_labels, analyze_run;
    analyze_flags.attach(analyze);
    analyze->add_option("--labels", analyze_labels, "'true' evaluates against dataset labels")
        ->check(CLI::IsMember({"true"}));
    analyze->add_option("--run", analyze_run, "trained run directory to read");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "train once per parameter value");
    TrainFlags sweep_flags;
    std::string sweep_param, sweep_values, sweep_out;
    sweep_flags.attach(sweep);
    sweep->add_option("--param", sweep_param, "w-init, order, rho or mask-rate")->required();
    sweep->add_option("--values", sweep_values, "comma-separated values")->required();
    sweep->add_option("--out", sweep_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (synth->parsed()) {
            return cmd_synth(synth_out, synth_nodes, synth_clusters, synth_views, synth_homophily,
                             synth_edges, synth_dim, synth_seed, synth_sep, synth_noise);
        }
        if (train_cmd->parsed()) {
            doagc::TrainConfig cfg = train_flags.final_config();
            cfg.validate();
            doagc::Dataset ds = doagc::load_dataset(train_flags.data_dir);
            const int k = train_flags.k > 0 ? train_flags.k : static_cast<int>(ds.manifest.k);
            run_training_and_write(ds, k, cfg, train_out);
            return 0;
        }
        if (analyze->parsed()) {
            return cmd_analyze(analyze_flags, analyze_labels == "true", analyze_run);
        }
        if (sweep->parsed()) {
            doagc::TrainConfig cfg = sweep_flags.final_config();
            cfg.validate();
            return cmd_sweep(sweep_flags, sweep_param, sweep_values, sweep_out);
        }
    } catch (const doagc::ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
