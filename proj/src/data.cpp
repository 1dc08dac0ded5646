#include "doagc/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

#include <json.hpp>

namespace doagc {

namespace fs = std::filesystem;

namespace {

std::string loc(const fs::path& file, std::size_t line) {
    return file.filename().string() + ":" + std::to_string(line);
}

std::ifstream open_or_throw(const fs::path& file) {
    if (!fs::exists(file)) throw IoError(file.string() + ": file not found");
    std::ifstream in(file);
    if (!in) throw IoError(file.string() + ": cannot open");
    return in;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw ContractError("format_double: conversion failed");
    return std::string(buf, ptr);
}

Tensor read_features_csv(const fs::path& file, std::size_t n, std::size_t d) {
    std::ifstream in = open_or_throw(file);
    Tensor x(n, d);
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (row >= n) throw IoError(loc(file, row + 1) + ": more than " + std::to_string(n) + " rows");
        std::size_t col = 0;
        const char* p = line.c_str();
        const char* end = p + line.size();
        while (p < end) {
            char* after = nullptr;
            const double v = std::strtod(p, &after);
            if (after == p) throw IoError(loc(file, row + 1) + ": bad number in column " + std::to_string(col + 1));
            if (col >= d) throw IoError(loc(file, row + 1) + ": more than " + std::to_string(d) + " columns");
            x(row, col++) = v;
            p = after;
            if (p < end) {
                if (*p != ',') throw IoError(loc(file, row + 1) + ": expected ',' after column " + std::to_string(col));
                ++p;
            }
        }
        if (col != d) {
            throw IoError(loc(file, row + 1) + ": " + std::to_string(col) + " columns, expected " + std::to_string(d));
        }
        ++row;
    }
    if (row != n) {
        throw IoError(file.filename().string() + ": " + std::to_string(row) + " rows, expected " + std::to_string(n));
    }
    return x;
}

Adjacency read_edge_list(const fs::path& file, std::size_t n) {
    std::ifstream in = open_or_throw(file);
    Tensor a(n, n);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        long long i = -1, j = -1;
        if (!(ss >> i >> j)) throw IoError(loc(file, lineno) + ": expected 'i j'");
        std::string rest;
        if (ss >> rest) throw IoError(loc(file, lineno) + ": trailing content '" + rest + "'");
        if (i < 0 || j < 0 || i >= static_cast<long long>(n) || j >= static_cast<long long>(n)) {
            throw IoError(loc(file, lineno) + ": node id outside [0," + std::to_string(n) + ")");
        }
        // duplicates and reversed duplicates collapse; direction is ignored
        a(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = 1.0;
        a(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = 1.0;
    }
    for (std::size_t i = 0; i < n; ++i) a(i, i) = 1.0;
    return Adjacency{std::move(a)};
}

std::vector<int> read_labels(const fs::path& file, std::size_t n, std::size_t k) {
    std::ifstream in = open_or_throw(file);
    std::vector<int> labels;
    labels.reserve(n);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        int v = 0;
        auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
        if (ec != std::errc() || ptr != line.data() + line.size()) {
            throw IoError(loc(file, lineno) + ": label is not an integer");
        }
        if (v < 0 || static_cast<std::size_t>(v) >= k) {
            throw IoError(loc(file, lineno) + ": label " + std::to_string(v) + " outside [0," +
                          std::to_string(k) + ")");
        }
        labels.push_back(v);
    }
    if (labels.size() != n) {
        throw IoError(file.filename().string() + ": " + std::to_string(labels.size()) +
                      " labels, expected " + std::to_string(n));
    }
    return labels;
}

DatasetManifest read_manifest(const fs::path& file) {
    std::ifstream in = open_or_throw(file);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(file.string() + ": invalid JSON (" + e.what() + ")");
    }
    DatasetManifest m;
    try {
        m.name = j.at("name").get<std::string>();
        m.n = j.at("n").get<std::size_t>();
        m.d = j.at("d").get<std::size_t>();
        m.k = j.at("k").get<std::size_t>();
        m.views = j.at("views").get<std::vector<std::string>>();
        m.features = j.at("features").get<std::string>();
        if (j.contains("labels") && !j.at("labels").is_null()) {
            m.labels = j.at("labels").get<std::string>();
        }
        m.scale_features = j.value("scale_features", true);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(file.string() + ": bad manifest field (" + e.what() + ")");
    }
    if (m.views.empty()) throw IoError(file.string() + ": manifest lists no views");
    if (m.n == 0 || m.d == 0 || m.k == 0) throw IoError(file.string() + ": n, d, k must be positive");
    if (m.k > m.n) throw IoError(file.string() + ": k exceeds n");
    return m;
}

} // namespace

Dataset load_dataset(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError(dir.string() + ": not a directory");
    DatasetManifest manifest = read_manifest(dir / "manifest.json");

    MultiViewGraph g;
    g.n = manifest.n;
    g.features = read_features_csv(dir / manifest.features, manifest.n, manifest.d);
    if (!g.features.all_finite()) {
        throw IoError((dir / manifest.features).filename().string() + ": non-finite feature value");
    }
    if (manifest.scale_features) g.features = min_max_scale_columns(g.features);
    for (const std::string& name : manifest.views) {
        g.views.push_back(read_edge_list(dir / name, manifest.n));
    }
    if (manifest.labels) {
        g.labels = read_labels(dir / *manifest.labels, manifest.n, manifest.k);
    }
    g.validate();
    return {std::move(g), std::move(manifest)};
}

void SynthSpec::validate() const {
    if (n == 0 || k == 0 || views == 0 || feature_dim == 0) {
        throw ContractError("SynthSpec: n, k, views, feature_dim must be positive");
    }
    if (k > n) throw ContractError("SynthSpec: k exceeds n");
    if (feature_dim < k) throw ContractError("SynthSpec: feature_dim must be >= k");
    if (edges < n) throw ContractError("SynthSpec: need at least n edges");
    if (target_homophily.size() != views) {
        throw ContractError("SynthSpec: need one homophily target per view");
    }
    for (double h : target_homophily) {
        if (!(h >= 0.0 && h <= 1.0)) throw ContractError("SynthSpec: homophily outside [0,1]");
    }
    if (!(center_separation > 0.0)) throw ContractError("SynthSpec: center_separation must be > 0");
    if (!(feature_noise >= 0.0)) throw ContractError("SynthSpec: feature_noise must be >= 0");
}

namespace {

std::vector<int> balanced_labels(std::size_t n, std::size_t k) {
    std::vector<int> labels(n);
    const std::size_t base = n / k, extra = n % k;
    std::size_t node = 0;
    for (std::size_t c = 0; c < k; ++c) {
        const std::size_t size = base + (c < extra ? 1 : 0);
        for (std::size_t i = 0; i < size; ++i) labels[node++] = static_cast<int>(c);
    }
    return labels;
}

using Pair = std::pair<std::uint32_t, std::uint32_t>;

// first m elements of a seeded partial Fisher-Yates shuffle
std::vector<Pair> sample_pairs(std::vector<Pair>& pool, std::size_t m, std::mt19937_64& rng) {
    for (std::size_t i = 0; i < m; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    return std::vector<Pair>(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));
}

} // namespace

std::size_t max_feasible_edges(std::size_t n, std::size_t k, double h) {
    const std::vector<int> labels = balanced_labels(n, k);
    std::size_t intra = 0;
    std::vector<std::size_t> sizes(k, 0);
    for (int y : labels) ++sizes[static_cast<std::size_t>(y)];
    for (std::size_t c = 0; c < k; ++c) intra += sizes[c] * (sizes[c] - 1) / 2;
    const std::size_t total = n * (n - 1) / 2;
    const std::size_t inter = total - intra;

    auto feasible = [&](std::size_t e) {
        const auto m = static_cast<std::size_t>(std::llround(h * static_cast<double>(e)));
        return m <= intra && e - m <= inter;
    };
    std::size_t lo = 0, hi = total;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo + 1) / 2;
        if (feasible(mid)) lo = mid;
        else hi = mid - 1;
    }
    return lo;
}

Dataset generate_synthetic(const SynthSpec& spec, const fs::path& out_dir) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);

    const std::vector<int> labels = balanced_labels(spec.n, spec.k);

    std::vector<Pair> intra_pool, inter_pool;
    for (std::uint32_t i = 0; i < spec.n; ++i) {
        for (std::uint32_t j = i + 1; j < spec.n; ++j) {
            (labels[i] == labels[j] ? intra_pool : inter_pool).push_back({i, j});
        }
    }

    MultiViewGraph g;
    g.n = spec.n;
    std::vector<std::vector<Pair>> view_edges(spec.views);
    for (std::size_t v = 0; v < spec.views; ++v) {
        const double h = spec.target_homophily[v];
        const auto m_intra =
            static_cast<std::size_t>(std::llround(h * static_cast<double>(spec.edges)));
        if (m_intra > intra_pool.size() || spec.edges - m_intra > inter_pool.size()) {
            throw InfeasibleError(
                "generate_synthetic: view " + std::to_string(v + 1) + " needs " +
                std::to_string(m_intra) + " intra / " + std::to_string(spec.edges - m_intra) +
                " inter pairs but pools hold " + std::to_string(intra_pool.size()) + " / " +
                std::to_string(inter_pool.size()) + "; maximum feasible edges at this ratio: " +
                std::to_string(max_feasible_edges(spec.n, spec.k, h)));
        }
        std::vector<Pair> chosen = sample_pairs(intra_pool, m_intra, rng);
        std::vector<Pair> inter = sample_pairs(inter_pool, spec.edges - m_intra, rng);
        chosen.insert(chosen.end(), inter.begin(), inter.end());
        std::sort(chosen.begin(), chosen.end());

        Tensor a(spec.n, spec.n);
        for (const auto& [i, j] : chosen) {
            a(i, j) = 1.0;
            a(j, i) = 1.0;
        }
        for (std::size_t i = 0; i < spec.n; ++i) a(i, i) = 1.0;
        g.views.push_back(Adjacency{std::move(a)});
        view_edges[v] = std::move(chosen);
    }

    // class centers: vertices of a scaled simplex translated so that every
    // coordinate saturates either high (own class) or low under the sigmoid
    Tensor centers(spec.k, spec.feature_dim, std::vector<double>(spec.k * spec.feature_dim,
                                                                 -0.5 * spec.center_separation));
    for (std::size_t c = 0; c < spec.k; ++c) centers(c, c) = 0.5 * spec.center_separation;

    std::normal_distribution<double> noise(0.0, 1.0);
    Tensor x(spec.n, spec.feature_dim);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const auto c = static_cast<std::size_t>(labels[i]);
        for (std::size_t j = 0; j < spec.feature_dim; ++j) {
            const double raw = centers(c, j) + spec.feature_noise * noise(rng);
            x(i, j) = 1.0 / (1.0 + std::exp(-raw));
        }
    }
    g.features = std::move(x);
    g.labels = labels;
    g.validate();

    DatasetManifest manifest;
    manifest.name = out_dir.filename().string().empty() ? std::string("synthetic")
                                                        : out_dir.filename().string();
    manifest.n = spec.n;
    manifest.d = spec.feature_dim;
    manifest.k = spec.k;
    for (std::size_t v = 0; v < spec.views; ++v) {
        manifest.views.push_back("view_" + std::to_string(v + 1) + ".edges");
    }
    manifest.features = "features.csv";
    manifest.labels = "labels.txt";
    manifest.scale_features = false; // already in [0,1] by construction

    fs::create_directories(out_dir);
    {
        nlohmann::ordered_json j;
        j["name"] = manifest.name;
        j["n"] = manifest.n;
        j["d"] = manifest.d;
        j["k"] = manifest.k;
        j["views"] = manifest.views;
        j["features"] = manifest.features;
        j["labels"] = *manifest.labels;
        j["scale_features"] = manifest.scale_features;
        std::ofstream out(out_dir / "manifest.json");
        out << j.dump(2) << "\n";
    }
    for (std::size_t v = 0; v < spec.views; ++v) {
        std::ofstream out(out_dir / manifest.views[v]);
        for (const auto& [i, j] : view_edges[v]) out << i << " " << j << "\n";
    }
    {
        std::ofstream out(out_dir / manifest.features);
        for (std::size_t i = 0; i < spec.n; ++i) {
            for (std::size_t j = 0; j < spec.feature_dim; ++j) {
                if (j) out << ",";
                out << format_double(g.features(i, j));
            }
            out << "\n";
        }
    }
    {
        std::ofstream out(out_dir / *manifest.labels);
        for (int y : labels) out << y << "\n";
    }

    return {std::move(g), std::move(manifest)};
}

} // namespace doagc
