#include "signgad/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace signgad {

const char* to_string(EvidenceKind kind) {
    switch (kind) {
    case EvidenceKind::DegreeAnomaly: return "degree_anomaly";
    case EvidenceKind::RelationDegreeProfile: return "relation_degree_profile";
    case EvidenceKind::RelationDisagreement: return "relation_disagreement";
    case EvidenceKind::NeighborFeatureDeviation: return "neighbor_feature_deviation";
    case EvidenceKind::FeatureSmoothness: return "feature_smoothness";
    case EvidenceKind::ReconstructionResidual: return "reconstruction_residual";
    }
    return "unknown";
}

EvidenceKind evidence_kind_from_string(const std::string& name) {
    for (const EvidenceKind kind : kAllEvidenceKinds) {
        if (name == to_string(kind)) {
            return kind;
        }
    }
    throw std::invalid_argument("unknown evidence kind: " + name);
}

bool requires_extra_relations(EvidenceKind kind) {
    return kind == EvidenceKind::RelationDegreeProfile ||
           kind == EvidenceKind::RelationDisagreement;
}

std::vector<double> degree_anomaly(const AttributedGraph& g, const GraphView& view,
                                   const std::vector<std::size_t>& train_ids, double eps) {
    if (train_ids.empty()) {
        throw std::invalid_argument("degree_anomaly: empty training set");
    }
    double mean = 0.0;
    for (const std::size_t id : train_ids) {
        mean += static_cast<double>(view.degs[id]);
    }
    mean /= static_cast<double>(train_ids.size());
    double var = 0.0;
    for (const std::size_t id : train_ids) {
        const double d = static_cast<double>(view.degs[id]) - mean;
        var += d * d;
    }
    const double sigma = std::sqrt(var / static_cast<double>(train_ids.size()));

    std::vector<double> out(g.n_nodes);
    for (std::size_t i = 0; i < g.n_nodes; ++i) {
        out[i] = std::abs((static_cast<double>(view.degs[i]) - mean) / (sigma + eps));
    }
    return out;
}

namespace {

// Per-relation degrees min-max normalized over the node set.
std::vector<double> normalized_relation_degrees(const Adjacency& adj, double eps) {
    std::vector<double> raw(adj.n);
    for (std::size_t i = 0; i < adj.n; ++i) {
        raw[i] = static_cast<double>(adj.degree(i));
    }
    return normalize_scores(raw, eps);
}

} // namespace

std::vector<double> relation_degree_profile(const AttributedGraph& g, double eps) {
    const std::size_t n_extra = g.n_extra_relations();
    if (n_extra == 0) {
        throw std::invalid_argument("relation_degree_profile: single-relation graph");
    }
    const std::size_t n_rel = n_extra + 1;
    std::vector<std::vector<double>> profiles(n_rel);
    for (std::size_t r = 0; r < n_rel; ++r) {
        profiles[r] = normalized_relation_degrees(g.relation(r), eps);
    }
    std::vector<double> out(g.n_nodes);
    for (std::size_t i = 0; i < g.n_nodes; ++i) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n_rel; ++r) {
            mean += profiles[r][i];
        }
        mean /= static_cast<double>(n_rel);
        double var = 0.0;
        for (std::size_t r = 0; r < n_rel; ++r) {
            const double d = profiles[r][i] - mean;
            var += d * d;
        }
        out[i] = std::sqrt(var / static_cast<double>(n_rel));
    }
    return out;
}

std::vector<double> relation_disagreement(const AttributedGraph& g, double eps) {
    const std::size_t n_extra = g.n_extra_relations();
    if (n_extra == 0) {
        throw std::invalid_argument("relation_disagreement: single-relation graph");
    }
    const std::vector<double> base = normalized_relation_degrees(g.base_adj, eps);
    std::vector<double> extra_mean(g.n_nodes, 0.0);
    for (std::size_t r = 0; r < n_extra; ++r) {
        const std::vector<double> nd = normalized_relation_degrees(g.extra_adjs[r], eps);
        for (std::size_t i = 0; i < g.n_nodes; ++i) {
            extra_mean[i] += nd[i];
        }
    }
    std::vector<double> out(g.n_nodes);
    for (std::size_t i = 0; i < g.n_nodes; ++i) {
        out[i] = std::abs(base[i] - extra_mean[i] / static_cast<double>(n_extra));
    }
    return out;
}

std::vector<double> neighbor_feature_deviation(const AttributedGraph& g, const GraphView& view) {
    std::vector<double> out(g.n_nodes);
    for (std::size_t i = 0; i < g.n_nodes; ++i) {
        const auto x = g.features.row(i);
        const auto h = view.h1.row(i);
        double s = 0.0;
        for (std::size_t c = 0; c < g.n_features; ++c) {
            const double d = x[c] - h[c];
            s += d * d;
        }
        out[i] = std::sqrt(s);
    }
    return out;
}

std::vector<double> feature_smoothness(const AttributedGraph& g, const GraphView& view) {
    std::vector<double> out(g.n_nodes);
    const double inv_d = g.n_features > 0 ? 1.0 / static_cast<double>(g.n_features) : 0.0;
    for (std::size_t i = 0; i < g.n_nodes; ++i) {
        const auto x = g.features.row(i);
        const auto h = view.h1.row(i);
        double s = 0.0;
        for (std::size_t c = 0; c < g.n_features; ++c) {
            s += std::abs(x[c] - h[c]);
        }
        out[i] = s * inv_d;
    }
    return out;
}

ReconstructionModel fit_reconstruction(const Matrix& x_train,
                                       const std::vector<std::size_t>& train_ids,
                                       std::size_t rank_cap) {
    if (x_train.rows == 0) {
        throw std::invalid_argument("fit_reconstruction: empty training matrix");
    }
    const std::size_t d = x_train.cols;
    ReconstructionModel model;
    model.fitted_on = train_ids;
    model.center.assign(d, 0.0);
    for (std::size_t r = 0; r < x_train.rows; ++r) {
        const auto row = x_train.row(r);
        for (std::size_t c = 0; c < d; ++c) {
            model.center[c] += row[c];
        }
    }
    for (double& v : model.center) {
        v /= static_cast<double>(x_train.rows);
    }

    Matrix centered(x_train.rows, d);
    for (std::size_t r = 0; r < x_train.rows; ++r) {
        const auto src = x_train.row(r);
        auto dst = centered.row(r);
        for (std::size_t c = 0; c < d; ++c) {
            dst[c] = src[c] - model.center[c];
        }
    }

    const std::size_t rank = std::min({rank_cap, d, x_train.rows});
    std::size_t effective = 0;
    Matrix basis = principal_basis(centered, rank, &effective);
    // Keep only the effective columns; padding stays in the projection layer.
    model.basis = Matrix(d, effective);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < effective; ++c) {
            model.basis.at(r, c) = basis.at(r, c);
        }
    }
    model.rank = effective;
    return model;
}

std::vector<double> reconstruction_residual(const ReconstructionModel& model, const Matrix& x) {
    const std::size_t d = model.center.size();
    if (x.cols != d) {
        throw std::invalid_argument("reconstruction_residual: feature dimension mismatch");
    }
    std::vector<double> out(x.rows);
    std::vector<double> centered(d), coeffs(model.rank);
    for (std::size_t r = 0; r < x.rows; ++r) {
        const auto row = x.row(r);
        for (std::size_t c = 0; c < d; ++c) {
            centered[c] = row[c] - model.center[c];
        }
        for (std::size_t k = 0; k < model.rank; ++k) {
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                s += model.basis.at(c, k) * centered[c];
            }
            coeffs[k] = s;
        }
        double resid = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            double rec = 0.0;
            for (std::size_t k = 0; k < model.rank; ++k) {
                rec += model.basis.at(c, k) * coeffs[k];
            }
            const double diff = centered[c] - rec;
            resid += diff * diff;
        }
        out[r] = std::sqrt(resid);
    }
    return out;
}

std::vector<double> normalize_scores(const std::vector<double>& raw, double eps) {
    if (raw.empty()) {
        return {};
    }
    double lo = raw[0], hi = raw[0];
    for (const double v : raw) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("normalize_scores: non-finite raw score");
        }
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double denom = (hi - lo) + eps;
    std::vector<double> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        double v = (raw[i] - lo) / denom;
        // For huge ranges the +eps is absorbed by rounding; keep the contract
        // that normalized entries are strictly below 1.
        if (v >= 1.0) {
            v = std::nextafter(1.0, 0.0);
        }
        out[i] = v;
    }
    return out;
}

EvidenceMatrix assemble_evidence(const AttributedGraph& g, const GraphView& view,
                                 const std::vector<EvidenceKind>& kinds,
                                 const std::vector<std::size_t>& train_ids,
                                 std::size_t svd_rank_cap, double eps) {
    std::set<EvidenceKind> seen;
    for (const EvidenceKind kind : kinds) {
        if (!seen.insert(kind).second) {
            throw std::invalid_argument(std::string("assemble_evidence: duplicate kind ") +
                                        to_string(kind));
        }
        if (requires_extra_relations(kind) && g.n_extra_relations() == 0) {
            throw std::invalid_argument(std::string("assemble_evidence: ") + to_string(kind) +
                                        " requires a multi-relation graph");
        }
    }

    EvidenceMatrix out;
    out.kinds = kinds;
    out.values = Matrix(g.n_nodes, kinds.size());
    for (std::size_t k = 0; k < kinds.size(); ++k) {
        std::vector<double> raw;
        switch (kinds[k]) {
        case EvidenceKind::DegreeAnomaly:
            raw = degree_anomaly(g, view, train_ids, eps);
            break;
        case EvidenceKind::RelationDegreeProfile:
            raw = relation_degree_profile(g, eps);
            break;
        case EvidenceKind::RelationDisagreement:
            raw = relation_disagreement(g, eps);
            break;
        case EvidenceKind::NeighborFeatureDeviation:
            raw = neighbor_feature_deviation(g, view);
            break;
        case EvidenceKind::FeatureSmoothness:
            raw = feature_smoothness(g, view);
            break;
        case EvidenceKind::ReconstructionResidual: {
            const ReconstructionModel model =
                fit_reconstruction(take_rows(g.features, train_ids), train_ids, svd_rank_cap);
            raw = reconstruction_residual(model, g.features);
            break;
        }
        }
        const std::vector<double> norm = normalize_scores(raw, eps);
        for (std::size_t i = 0; i < g.n_nodes; ++i) {
            out.values.at(i, k) = norm[i];
        }
    }
    return out;
}

} // namespace signgad
