#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "doagc/graph.hpp"

namespace doagc {

struct DatasetManifest {
    std::string name;
    std::size_t n = 0;
    std::size_t d = 0;
    std::size_t k = 0;
    std::vector<std::string> views;
    std::string features;
    std::optional<std::string> labels;
    bool scale_features = true;
};

struct Dataset {
    MultiViewGraph graph;
    DatasetManifest manifest;
};

// Directory layout: manifest.json, per-view undirected edge lists
// ("i j" per line, 0-based), a headerless CSV feature matrix, and an
// optional labels file with one integer per line. Edges are symmetrized,
// deduplicated, and completed with self-loops on load.
Dataset load_dataset(const std::filesystem::path& dir);

struct SynthSpec {
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t views = 1;
    std::vector<double> target_homophily; // one value per view, each in [0,1]
    std::size_t edges = 0;                // undirected non-self edges per view
    std::size_t feature_dim = 0;
    double center_separation = 6.0;
    double feature_noise = 1.0;
    std::uint64_t seed = 42;

    void validate() const;
};

// Homophily-controlled multi-view generator: balanced classes, exactly
// round(h*E) intra-class edges per view sampled without replacement, features
// drawn around translated simplex class centers and sigmoid-squashed into
// [0,1]. Writes the dataset directory and returns the same graph in memory.
Dataset generate_synthetic(const SynthSpec& spec, const std::filesystem::path& out_dir);

// Largest edge count per view for which the class-pair pools can satisfy the
// target homophily ratio.
std::size_t max_feasible_edges(std::size_t n, std::size_t k, double homophily);

} // namespace doagc
