#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "signgad/gbdt.hpp"
#include "signgad/linalg.hpp"
#include "signgad/logistic.hpp"

namespace signgad {

enum class DetectorKind { Linear, Tree, Stacked, RelationAware };

const char* to_string(DetectorKind kind);
DetectorKind detector_kind_from_string(const std::string& name);

struct DetectorConfig {
    LogisticConfig logistic;
    GbdtConfig tree;
    std::size_t q_dim = 8;   // relation projection width
    std::size_t n_folds = 5; // out-of-fold cross-fitting
    double epsilon = 1e-12;
};

// Per-column mean/std fitted on training rows; zero-variance columns are
// epsilon-guarded.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    void fit(const Matrix& x, double eps);
    Matrix transform(const Matrix& x) const;
};

struct LinearUnit {
    Standardizer standardizer;
    LogisticModel model;

    static LinearUnit fit(const Matrix& x, const std::vector<int>& y, const DetectorConfig& cfg);
    std::vector<double> score(const Matrix& x) const;
};

struct TreeUnit {
    Standardizer standardizer;
    GbdtModel model;

    static TreeUnit fit(const Matrix& x, const std::vector<int>& y, const DetectorConfig& cfg);
    std::vector<double> score(const Matrix& x) const;
};

// Centered rank-limited orthonormal projection of a relation encoding. The
// output width is always q_dim; coordinates past the effective rank are zero.
struct RelationProjection {
    std::vector<double> center;
    Matrix basis; // input_width x q_dim, zero columns beyond effective_rank
    std::size_t effective_rank = 0;

    Matrix project(const Matrix& rows) const;
};

struct RelationBranch {
    RelationProjection projection;
    LinearUnit lin;
    TreeUnit tree;
};

struct TrainedDetector {
    DetectorKind kind = DetectorKind::Linear;
    std::uint64_t seed = 0;

    LinearUnit linear; // Linear kind
    TreeUnit tree;     // Tree kind

    // Stacked (also the trunk of RelationAware): base detectors + meta model.
    LinearUnit base_lin;
    TreeUnit base_tree;
    LinearUnit meta;

    // RelationAware extras.
    std::vector<RelationBranch> branches;
    LinearUnit rel_final;
};

// Feature rows for scoring: z for all detectors, plus the per-extra-relation
// graph-context encodings for the relation-aware kind (aligned row sets).
struct DetectorInputs {
    Matrix z;
    std::vector<Matrix> relation_phis;
};

// Stratified fold assignment for out-of-fold cross-fitting. Fold count is
// max(2, min(n_folds, smallest per-class count)). Assignment depends on row
// content, not row order, so cross-fitting is stable under permutation.
std::vector<int> stratified_folds(const Matrix& x, const std::vector<int>& y,
                                  std::size_t n_folds, std::uint64_t seed);

TrainedDetector train_linear(const Matrix& z_train, const std::vector<int>& y_train,
                             std::uint64_t seed, const DetectorConfig& cfg = {});

TrainedDetector train_tree(const Matrix& z_train, const std::vector<int>& y_train,
                           std::uint64_t seed, const DetectorConfig& cfg = {});

// Stacked detector features psi for every row of z_all: out-of-fold scores at
// training rows, full-train base scores elsewhere.
Matrix build_stacked_features(const Matrix& z_all, const std::vector<std::size_t>& train_ids,
                              const std::vector<int>& y_train, std::uint64_t seed,
                              const DetectorConfig& cfg = {}, std::vector<int>* folds_out = nullptr);

TrainedDetector train_stacked(const Matrix& z_train, const std::vector<int>& y_train,
                              std::uint64_t seed, const DetectorConfig& cfg = {});

RelationProjection fit_relation_projection(const Matrix& phi_r_train, std::size_t q_dim = 8);

TrainedDetector train_relation_aware(const Matrix& z_train,
                                     const std::vector<Matrix>& relation_phi_train,
                                     const std::vector<int>& y_train, std::uint64_t seed,
                                     const DetectorConfig& cfg = {});

// Unified trainer used by the pipeline.
TrainedDetector train_detector(DetectorKind kind, const DetectorInputs& train_rows,
                               const std::vector<int>& y_train, std::uint64_t seed,
                               const DetectorConfig& cfg = {});

// Deterministic scores in [0, 1], one per input row.
std::vector<double> score_detector(const TrainedDetector& det, const DetectorInputs& rows);

// Versioned binary blob round-trip for report bundles.
std::vector<std::uint8_t> serialize_detector(const TrainedDetector& det);
TrainedDetector deserialize_detector(const std::vector<std::uint8_t>& blob);

} // namespace signgad
