#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "signgad/detector.hpp"
#include "signgad/encoding.hpp"
#include "signgad/metrics.hpp"
#include "signgad/planner.hpp"

namespace signgad {

// Encodings shared by every candidate workflow of one run: per-topology phi
// and normalized evidence columns, per-extra-relation phi, and the split
// bookkeeping. Built once, read concurrently.
struct EncodingCache {
    const AttributedGraph* graph = nullptr;
    Matrix phi_base;
    Matrix phi_fused;                  // empty when R = 0
    std::vector<Matrix> relation_phis; // one per extra relation
    // normalized evidence columns keyed by (topology, kind)
    std::map<std::pair<int, EvidenceKind>, std::vector<double>> evidence;

    std::vector<std::size_t> train_ids, val_ids, test_ids;
    std::vector<int> y_train, y_val, y_test;

    const Matrix& phi(Topology t) const {
        return t == Topology::Base ? phi_base : phi_fused;
    }
    // z = [phi || selected normalized evidence columns]
    Matrix build_z(const WorkflowSpec& spec) const;
};

EncodingCache build_encoding_cache(const AttributedGraph& g, std::size_t svd_rank_cap,
                                   double eps);

struct WorkflowEvaluation {
    WorkflowSpec spec;
    TrainedDetector detector;
    bool feasible = false;
    std::string error; // set when infeasible

    double tau_star = 0.0;
    double auc_val = 0.0;
    double f1_val = 0.0;
    double penalty = 0.0;
    std::array<double, 3> q{0.0, 0.0, 0.0};
    std::vector<std::string> warnings;
};

struct RefitDecision {
    bool evaluated = false; // guard could be computed (both classes in V_cal)
    bool accepted = false;
    std::array<double, 2> m_orig{0.0, 0.0};  // (AUC, F1 at tau*) on V_cal
    std::array<double, 2> m_refit{0.0, 0.0};
    std::vector<std::size_t> refit_ids;
    std::vector<std::size_t> cal_ids;
    std::string warning;
};

// Workflow complexity used as the last lexicographic component:
// |evidence| + 10 * detector tier + 5 * [fused topology].
double complexity_penalty(const WorkflowSpec& spec);

// Trains the spec's detector on V_tr, scores V_val, calibrates tau*, and
// assembles the Q_val triple (min(A,F), alpha*A + (1-alpha)*F, -penalty).
// Training failures mark the workflow infeasible instead of throwing.
WorkflowEvaluation evaluate_workflow(const WorkflowSpec& spec, const EncodingCache& cache,
                                     double alpha, std::uint64_t seed,
                                     const DetectorConfig& cfg);

// Index of the lexicographic maximum of q over feasible evaluations; exact
// ties resolve to the smallest planner_rank. Throws if none is feasible.
std::size_t select_workflow(const std::vector<WorkflowEvaluation>& evaluations);

// Stratified 50/50 split of V_val into refit/calibration subsets, retrain on
// V_tr + V_refit with the same spec and tau*, and accept the refit detector
// only if its rounded (AUC, F1) on V_cal is lexicographically >= the
// original's. Returns the deployed detector.
struct RefitOutcome {
    TrainedDetector deployed;
    RefitDecision decision;
};
RefitOutcome guarded_refit(const WorkflowEvaluation& selected, const EncodingCache& cache,
                           std::uint64_t seed, const DetectorConfig& cfg,
                           double refit_fraction = 0.5);

// Binary test predictions: 1 iff score >= tau*.
std::vector<int> predict_test(const TrainedDetector& deployed, const WorkflowSpec& spec,
                              const EncodingCache& cache);

// Round to 4 decimals, the guard's comparison precision.
double round4(double v);

} // namespace signgad
