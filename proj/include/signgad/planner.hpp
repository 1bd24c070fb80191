#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "signgad/detector.hpp"
#include "signgad/evidence.hpp"
#include "signgad/graph.hpp"

namespace signgad {

struct GraphStats {
    std::size_t n_nodes = 0;
    std::size_t n_relations = 1; // base + extras
    std::size_t n_extra_relations = 0;
    std::vector<std::size_t> n_edges_per_relation; // undirected counts
    std::size_t feature_dim = 0;
    std::size_t n_train = 0;
    std::size_t n_val = 0;
    std::size_t n_test = 0;
    double train_anomaly_rate = 0.0;
    double mean_degree = 0.0; // base relation
    double degree_std = 0.0;
    double density = 0.0;     // undirected edges / (N * (N - 1))
    double homophily = 0.0;   // train-train edges with equal labels; 0 if none
};

struct TaskDescriptor {
    std::string task_text;
    GraphStats stats;
    std::size_t supervision_budget = 0; // |V_tr|
};

// One candidate workflow: topology, evidence set, detector kind, and the
// decision threshold filled in by validation calibration.
struct WorkflowSpec {
    Topology topology = Topology::Base;
    std::vector<EvidenceKind> evidence_kinds;
    DetectorKind detector = DetectorKind::Linear;
    std::optional<double> threshold;
    std::size_t planner_rank = 0;

    bool same_choices(const WorkflowSpec& other) const {
        return topology == other.topology && detector == other.detector &&
               evidence_kinds == other.evidence_kinds;
    }
};

GraphStats compute_graph_stats(const AttributedGraph& g);

TaskDescriptor build_task_descriptor(const std::string& task_text, const AttributedGraph& g);

// Deterministic enumeration of the candidate workflow grid
// detector x topology x evidence-prefix, truncated to n_workflows.
// Evidence prefixes are drawn from a fixed priority order with
// relation-dependent entries dropped on single-relation graphs.
std::vector<WorkflowSpec> plan_rule_based(const TaskDescriptor& descriptor,
                                          std::size_t n_workflows);

// Empty result means the spec is valid.
std::vector<std::string> validate_spec(const WorkflowSpec& spec, std::size_t n_extra_relations);
std::vector<std::string> validate_spec(const WorkflowSpec& spec, const AttributedGraph& g);

// Evidence kinds ordered by how often workflows select them, used for the
// rule-based enumeration prefixes.
std::vector<EvidenceKind> evidence_priority_order(std::size_t n_extra_relations);

} // namespace signgad
