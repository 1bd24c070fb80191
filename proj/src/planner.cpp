#include "signgad/planner.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace signgad {

GraphStats compute_graph_stats(const AttributedGraph& g) {
    GraphStats s;
    s.n_nodes = g.n_nodes;
    s.n_extra_relations = g.n_extra_relations();
    s.n_relations = 1 + s.n_extra_relations;
    s.feature_dim = g.n_features;
    s.n_edges_per_relation.push_back(g.base_adj.edge_count_undirected());
    for (const Adjacency& adj : g.extra_adjs) {
        s.n_edges_per_relation.push_back(adj.edge_count_undirected());
    }

    const std::vector<std::size_t> train = g.split_ids(Split::Train);
    s.n_train = train.size();
    s.n_val = g.split_ids(Split::Val).size();
    s.n_test = g.split_ids(Split::Test).size();
    if (!train.empty()) {
        std::size_t anomalies = 0;
        for (const std::size_t id : train) {
            anomalies += static_cast<std::size_t>(g.labels[id] == Label::Anomaly);
        }
        s.train_anomaly_rate = static_cast<double>(anomalies) / static_cast<double>(train.size());
    }

    const std::vector<std::size_t> degs = degrees(g.base_adj);
    if (g.n_nodes > 0) {
        double mean = 0.0;
        for (const std::size_t d : degs) {
            mean += static_cast<double>(d);
        }
        mean /= static_cast<double>(g.n_nodes);
        double var = 0.0;
        for (const std::size_t d : degs) {
            const double diff = static_cast<double>(d) - mean;
            var += diff * diff;
        }
        s.mean_degree = mean;
        s.degree_std = std::sqrt(var / static_cast<double>(g.n_nodes));
    }
    if (g.n_nodes > 1) {
        s.density = static_cast<double>(g.base_adj.edge_count_undirected()) /
                    (static_cast<double>(g.n_nodes) * static_cast<double>(g.n_nodes - 1));
    }

    // Homophily over train-train base edges (undirected pairs, u < v).
    std::size_t tt_edges = 0, tt_equal = 0;
    for (const std::size_t u : train) {
        for (const std::uint32_t v : g.base_adj.neighbors(u)) {
            if (v <= u || g.splits[v] != Split::Train) {
                continue;
            }
            ++tt_edges;
            tt_equal += static_cast<std::size_t>(g.labels[u] == g.labels[v]);
        }
    }
    s.homophily = tt_edges > 0 ? static_cast<double>(tt_equal) / static_cast<double>(tt_edges)
                               : 0.0;
    return s;
}

TaskDescriptor build_task_descriptor(const std::string& task_text, const AttributedGraph& g) {
    TaskDescriptor d;
    d.task_text = task_text;
    d.stats = compute_graph_stats(g);
    d.supervision_budget = d.stats.n_train;
    return d;
}

std::vector<EvidenceKind> evidence_priority_order(std::size_t n_extra_relations) {
    // Ordered by measured selection frequency, most informative first.
    std::vector<EvidenceKind> order = {
        EvidenceKind::NeighborFeatureDeviation,
        EvidenceKind::ReconstructionResidual,
        EvidenceKind::DegreeAnomaly,
        EvidenceKind::FeatureSmoothness,
        EvidenceKind::RelationDisagreement,
        EvidenceKind::RelationDegreeProfile,
    };
    if (n_extra_relations == 0) {
        std::erase_if(order, [](EvidenceKind k) { return requires_extra_relations(k); });
    }
    return order;
}

std::vector<std::string> validate_spec(const WorkflowSpec& spec, std::size_t n_extra_relations) {
    std::vector<std::string> violations;
    if (spec.topology == Topology::Fused && n_extra_relations == 0) {
        violations.push_back("fused topology requires a multi-relation graph");
    }
    if (spec.detector == DetectorKind::RelationAware && n_extra_relations == 0) {
        violations.push_back("relation_aware detector requires a multi-relation graph");
    }
    std::set<EvidenceKind> seen;
    for (const EvidenceKind kind : spec.evidence_kinds) {
        if (!seen.insert(kind).second) {
            violations.push_back(std::string("duplicate evidence kind: ") + to_string(kind));
        }
        if (requires_extra_relations(kind) && n_extra_relations == 0) {
            violations.push_back(std::string(to_string(kind)) +
                                 " requires a multi-relation graph");
        }
    }
    if (spec.threshold && !(*spec.threshold > 0.0 && *spec.threshold < 1.0)) {
        violations.push_back("threshold outside (0, 1)");
    }
    return violations;
}

std::vector<std::string> validate_spec(const WorkflowSpec& spec, const AttributedGraph& g) {
    return validate_spec(spec, g.n_extra_relations());
}

std::vector<WorkflowSpec> plan_rule_based(const TaskDescriptor& descriptor,
                                          std::size_t n_workflows) {
    if (n_workflows < 1) {
        throw std::invalid_argument("plan_rule_based: n_workflows must be >= 1");
    }
    const std::size_t n_extra = descriptor.stats.n_extra_relations;
    const std::vector<EvidenceKind> priority = evidence_priority_order(n_extra);

    std::vector<std::size_t> subset_sizes;
    for (const std::size_t size : {std::size_t{0}, std::size_t{2}, std::size_t{4},
                                   std::min<std::size_t>(6, priority.size())}) {
        if (size <= priority.size() &&
            std::find(subset_sizes.begin(), subset_sizes.end(), size) == subset_sizes.end()) {
            subset_sizes.push_back(size);
        }
    }

    std::vector<DetectorKind> detectors = {DetectorKind::Linear, DetectorKind::Tree,
                                           DetectorKind::Stacked};
    if (n_extra > 0) {
        detectors.push_back(DetectorKind::RelationAware);
    }
    std::vector<Topology> topologies = {Topology::Base};
    if (n_extra > 0) {
        topologies.push_back(Topology::Fused);
    }

    std::vector<WorkflowSpec> specs;
    for (const DetectorKind det : detectors) {
        for (const Topology topo : topologies) {
            for (const std::size_t size : subset_sizes) {
                WorkflowSpec spec;
                spec.topology = topo;
                spec.detector = det;
                spec.evidence_kinds.assign(priority.begin(),
                                           priority.begin() + static_cast<std::ptrdiff_t>(size));
                spec.planner_rank = specs.size();
                specs.push_back(std::move(spec));
                if (specs.size() == n_workflows) {
                    return specs;
                }
            }
        }
    }
    return specs;
}

} // namespace signgad
