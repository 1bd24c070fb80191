#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "signgad/graph.hpp"

namespace signgad {

// Stratified split assignment for labeled nodes: per class,
// floor(train_ratio * count) training nodes (at least 1), and the remainder
// divided val/test by val_fraction. Unlabeled nodes keep Split::None.
std::vector<Split> stratified_splits(const std::vector<Label>& labels, double train_ratio,
                                     double val_fraction, std::uint64_t seed);

// Dataset directory layout:
//   relation_<r>.edges   one "u v" pair per line (relation_0 required)
//   features.csv         N rows, d comma-separated columns, no header
//   features.bin         row-major float64 (+ features.shape sidecar "N d")
//   labels.txt           0 / 1 / ? per line
//   splits.txt           optional: train / val / test / none per line
// When splits.txt is absent the split is sampled at train_ratio (seeded).
// features.csv wins when both feature forms are present.
AttributedGraph load_dataset(const std::string& dir, double train_ratio, double val_fraction,
                             std::uint64_t seed);

// Writes a graph in the dataset layout (features.csv at full precision, with
// splits.txt). load_dataset round-trips it identically.
void save_dataset(const std::string& dir, const AttributedGraph& g);

struct SyntheticSpec {
    std::size_t n_nodes = 2000;
    std::size_t feature_dim = 16;
    double anomaly_rate = 0.05;
    std::size_t n_extra_relations = 2;
    double homophily = 0.95;     // probability an edge stays within the community
    double anomaly_shift = 5.0;  // feature offset magnitude along a random direction
    double anomaly_rewire = 0.6; // edge rewiring rate; also drives degree inflation
    std::uint64_t seed = 42;

    // Split generation (the graph invariant requires labeled nodes to carry
    // splits at construction).
    double train_ratio = 0.01;
    double val_fraction = 0.5;
};

// Planted-anomaly generator: community-structured homophilous layers with
// Gaussian features; anomalies get a random-direction feature shift, rewired
// edges and inflated degree in the base relation. Extra relations are
// independent homophilous layers left untouched by anomalies, so relation
// evidence carries signal. Deterministic per seed.
AttributedGraph generate_synthetic(const SyntheticSpec& spec);

} // namespace signgad
