#pragma once

#include <string>
#include <vector>

#include "signgad/graph.hpp"
#include "signgad/linalg.hpp"

namespace signgad {

inline constexpr double kEpsilon = 1e-12;

enum class EvidenceKind {
    DegreeAnomaly,
    RelationDegreeProfile,
    RelationDisagreement,
    NeighborFeatureDeviation,
    FeatureSmoothness,
    ReconstructionResidual,
};

inline constexpr EvidenceKind kAllEvidenceKinds[] = {
    EvidenceKind::DegreeAnomaly,
    EvidenceKind::RelationDegreeProfile,
    EvidenceKind::RelationDisagreement,
    EvidenceKind::NeighborFeatureDeviation,
    EvidenceKind::FeatureSmoothness,
    EvidenceKind::ReconstructionResidual,
};

const char* to_string(EvidenceKind kind);
EvidenceKind evidence_kind_from_string(const std::string& name);

// Relation degree profile and relation disagreement only exist on
// multi-relation graphs.
bool requires_extra_relations(EvidenceKind kind);

// Low-rank reconstruction of node attributes fitted on training rows.
// Mean-centered truncated SVD; rank capped at min(rank_cap, d, n_train).
struct ReconstructionModel {
    std::vector<double> center;       // train mean, length d
    Matrix basis;                     // d x rank, orthonormal columns
    std::size_t rank = 0;             // effective rank
    std::vector<std::size_t> fitted_on;
};

struct EvidenceMatrix {
    Matrix values; // N x K, entries in [0, 1)
    std::vector<EvidenceKind> kinds;
};

// --- raw evidence scores (pre-normalization) ----------------------------

// |z-score| of the node degree against the labeled training degrees.
std::vector<double> degree_anomaly(const AttributedGraph& g, const GraphView& view,
                                   const std::vector<std::size_t>& train_ids,
                                   double eps = kEpsilon);

// Population standard deviation of the per-relation normalized-degree profile.
std::vector<double> relation_degree_profile(const AttributedGraph& g, double eps = kEpsilon);

// |base normalized degree - mean extra-relation normalized degree|.
std::vector<double> relation_disagreement(const AttributedGraph& g, double eps = kEpsilon);

// L2 distance between a node's features and its first-order neighborhood mean.
std::vector<double> neighbor_feature_deviation(const AttributedGraph& g, const GraphView& view);

// Mean absolute per-dimension deviation from the neighborhood mean.
std::vector<double> feature_smoothness(const AttributedGraph& g, const GraphView& view);

ReconstructionModel fit_reconstruction(const Matrix& x_train,
                                       const std::vector<std::size_t>& train_ids,
                                       std::size_t rank_cap = 16);

// L2 reconstruction residual of every row of x under the fitted subspace.
std::vector<double> reconstruction_residual(const ReconstructionModel& model, const Matrix& x);

// Min-max normalization over all nodes: (e - min) / (max - min + eps).
// Output entries lie in [0, 1); ranking is preserved.
std::vector<double> normalize_scores(const std::vector<double>& raw, double eps = kEpsilon);

// Normalized evidence columns in the order of `kinds`. Empty kinds yields an
// N x 0 matrix. Relation-dependent kinds on a single-relation graph and
// duplicate kinds are rejected.
EvidenceMatrix assemble_evidence(const AttributedGraph& g, const GraphView& view,
                                 const std::vector<EvidenceKind>& kinds,
                                 const std::vector<std::size_t>& train_ids,
                                 std::size_t svd_rank_cap = 16, double eps = kEpsilon);

} // namespace signgad
