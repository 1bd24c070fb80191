#pragma once

#include <cstdint>
#include <string>

#include "signgad/dataset.hpp"
#include "signgad/detector.hpp"

namespace signgad {

// Full run configuration. Every field is addressable from the flat key=value
// config file; CLI flags override file values.
struct RunConfig {
    // Data source: a dataset directory, or the synthetic generator when empty.
    std::string dataset_dir;
    std::string task_text_file;
    std::string task_text;

    double train_ratio = 0.01;
    double val_fraction = 0.5; // of non-train labeled nodes
    std::size_t n_workflows = 20;
    double alpha = 0.5;

    std::string planner = "rule"; // rule | llm
    std::string llm_endpoint;
    std::string llm_model = "gpt-4.1";
    double llm_timeout_s = 30.0;

    std::uint64_t seed = 42;
    std::size_t workers = 1;

    // Detector-bank knobs.
    std::size_t q_dim = 8;
    std::size_t svd_rank = 16;
    std::size_t tree_rounds = 100;
    std::size_t tree_depth = 3;
    double tree_lr = 0.1;
    std::size_t tree_min_leaf = 2;
    double tree_leaf_lambda = 1.0;
    double linear_l2 = 1e-4;
    double refit_split = 0.5;
    double epsilon = 1e-12;

    // Ablation switches (set by the sweep driver, also addressable directly).
    bool refit_enabled = true;
    bool search_enabled = true;
    bool bank_enabled = true; // false forces the linear detector only
    int force_k = -1;         // >= 0 pins the evidence subset size

    SyntheticSpec synth;

    DetectorConfig detector_config() const;
    void validate() const;
};

// Parses a flat key=value file ('#' comments, blank lines ignored).
RunConfig parse_config_file(const std::string& path);

// Applies one key=value assignment (shared by the file parser and CLI -D).
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

} // namespace signgad
