#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "signgad/linalg.hpp"

namespace signgad {

struct GbdtConfig {
    std::size_t rounds = 100;
    std::size_t max_depth = 3;
    double learning_rate = 0.1;
    std::size_t min_samples_leaf = 2;
    double leaf_lambda = 1.0; // L2 on leaf values
};

struct GbdtNode {
    std::int32_t feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0; // leaf weight
};

struct GbdtTree {
    std::vector<GbdtNode> nodes; // nodes[0] is the root
};

struct GbdtModel {
    GbdtConfig config;
    std::vector<GbdtTree> trees;
};

// Gradient-boosted depth-limited trees on the logistic loss with the same
// class-balanced row weights as the linear detector. Exact greedy splits over
// midpoints of consecutive distinct feature values; ties resolved toward the
// lowest feature index and threshold. Fully deterministic (no subsampling)
// and bit-stable under training-row permutation. Requires both classes.
GbdtModel train_gbdt(const Matrix& x, const std::vector<int>& y, const GbdtConfig& cfg = {});

// Raw boosted margins (pre-sigmoid).
std::vector<double> gbdt_margins(const GbdtModel& model, const Matrix& x);

// Sigmoid of the boosted margin, in (0, 1).
std::vector<double> gbdt_scores(const GbdtModel& model, const Matrix& x);

} // namespace signgad
