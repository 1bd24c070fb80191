#include "signgad/search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "signgad/rng.hpp"

namespace signgad {

Matrix EncodingCache::build_z(const WorkflowSpec& spec) const {
    const Matrix& base = phi(spec.topology);
    Matrix z(base.rows, base.cols + spec.evidence_kinds.size());
    for (std::size_t r = 0; r < base.rows; ++r) {
        const auto src = base.row(r);
        std::copy(src.begin(), src.end(), z.row(r).begin());
    }
    for (std::size_t k = 0; k < spec.evidence_kinds.size(); ++k) {
        const EvidenceKind kind = spec.evidence_kinds[k];
        const int topo_key = requires_extra_relations(kind) ||
                                     kind == EvidenceKind::ReconstructionResidual
                                 ? 0 // topology-independent kinds stored once
                                 : static_cast<int>(spec.topology);
        const auto it = evidence.find({topo_key, kind});
        if (it == evidence.end()) {
            throw std::logic_error("EncodingCache: missing evidence column");
        }
        for (std::size_t r = 0; r < base.rows; ++r) {
            z.at(r, base.cols + k) = it->second[r];
        }
    }
    return z;
}

EncodingCache build_encoding_cache(const AttributedGraph& g, std::size_t svd_rank_cap,
                                   double eps) {
    EncodingCache cache;
    cache.graph = &g;
    cache.train_ids = g.split_ids(Split::Train);
    cache.val_ids = g.split_ids(Split::Val);
    cache.test_ids = g.split_ids(Split::Test);
    const auto labels_of = [&](const std::vector<std::size_t>& ids) {
        std::vector<int> y(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) {
            y[i] = g.labels[ids[i]] == Label::Anomaly ? 1 : 0;
        }
        return y;
    };
    cache.y_train = labels_of(cache.train_ids);
    cache.y_val = labels_of(cache.val_ids);
    cache.y_test = labels_of(cache.test_ids);

    std::vector<std::pair<Topology, GraphView>> views;
    views.emplace_back(Topology::Base, make_graph_view(g, Topology::Base));
    if (g.n_extra_relations() > 0) {
        views.emplace_back(Topology::Fused, make_graph_view(g, Topology::Fused));
    }

    for (const auto& [topo, view] : views) {
        Matrix phi = graph_context_encoding(g, view);
        if (topo == Topology::Base) {
            cache.phi_base = std::move(phi);
        } else {
            cache.phi_fused = std::move(phi);
        }
        const int key = static_cast<int>(topo);
        cache.evidence[{key, EvidenceKind::DegreeAnomaly}] =
            normalize_scores(degree_anomaly(g, view, cache.train_ids, eps), eps);
        cache.evidence[{key, EvidenceKind::NeighborFeatureDeviation}] =
            normalize_scores(neighbor_feature_deviation(g, view), eps);
        cache.evidence[{key, EvidenceKind::FeatureSmoothness}] =
            normalize_scores(feature_smoothness(g, view), eps);
    }

    // Topology-independent kinds, stored under the base key.
    const ReconstructionModel recon =
        fit_reconstruction(take_rows(g.features, cache.train_ids), cache.train_ids, svd_rank_cap);
    cache.evidence[{0, EvidenceKind::ReconstructionResidual}] =
        normalize_scores(reconstruction_residual(recon, g.features), eps);
    if (g.n_extra_relations() > 0) {
        cache.evidence[{0, EvidenceKind::RelationDegreeProfile}] =
            normalize_scores(relation_degree_profile(g, eps), eps);
        cache.evidence[{0, EvidenceKind::RelationDisagreement}] =
            normalize_scores(relation_disagreement(g, eps), eps);
        for (std::size_t r = 0; r < g.n_extra_relations(); ++r) {
            cache.relation_phis.push_back(
                graph_context_encoding(g, make_relation_view(g, r)));
        }
    }
    return cache;
}

double complexity_penalty(const WorkflowSpec& spec) {
    double tier = 0.0;
    switch (spec.detector) {
    case DetectorKind::Linear: tier = 0.0; break;
    case DetectorKind::Tree: tier = 1.0; break;
    case DetectorKind::Stacked: tier = 2.0; break;
    case DetectorKind::RelationAware: tier = 3.0; break;
    }
    return static_cast<double>(spec.evidence_kinds.size()) + 10.0 * tier +
           (spec.topology == Topology::Fused ? 5.0 : 0.0);
}

namespace {

DetectorInputs gather_inputs(const EncodingCache& cache, const Matrix& z_all,
                             const WorkflowSpec& spec, const std::vector<std::size_t>& ids) {
    DetectorInputs inputs;
    inputs.z = take_rows(z_all, ids);
    if (spec.detector == DetectorKind::RelationAware) {
        for (const Matrix& phi_r : cache.relation_phis) {
            inputs.relation_phis.push_back(take_rows(phi_r, ids));
        }
    }
    return inputs;
}

} // namespace

WorkflowEvaluation evaluate_workflow(const WorkflowSpec& spec, const EncodingCache& cache,
                                     double alpha, std::uint64_t seed,
                                     const DetectorConfig& cfg) {
    WorkflowEvaluation eval;
    eval.spec = spec;
    eval.penalty = complexity_penalty(spec);

    const std::vector<std::string> violations =
        validate_spec(spec, cache.graph->n_extra_relations());
    if (!violations.empty()) {
        eval.error = violations.front();
        return eval;
    }

    try {
        const Matrix z_all = cache.build_z(spec);
        const DetectorInputs train_rows = gather_inputs(cache, z_all, spec, cache.train_ids);
        eval.detector = train_detector(spec.detector, train_rows, cache.y_train, seed, cfg);

        const DetectorInputs val_rows = gather_inputs(cache, z_all, spec, cache.val_ids);
        const std::vector<double> scores = score_detector(eval.detector, val_rows);

        const Calibration cal = calibrate_threshold(scores, cache.y_val);
        eval.tau_star = cal.tau;
        eval.f1_val = cal.f1;
        const AucResult a = auc(scores, cache.y_val);
        if (a.single_class) {
            eval.warnings.push_back("validation AUC degenerate (single class), using 0.5");
        }
        eval.auc_val = a.value;
        eval.spec.threshold = cal.tau;
        eval.feasible = true;
        eval.q = {std::min(eval.auc_val, eval.f1_val),
                  alpha * eval.auc_val + (1.0 - alpha) * eval.f1_val, -eval.penalty};
    } catch (const std::exception& e) {
        eval.feasible = false;
        eval.error = e.what();
    }
    return eval;
}

std::size_t select_workflow(const std::vector<WorkflowEvaluation>& evaluations) {
    std::size_t best = evaluations.size();
    for (std::size_t i = 0; i < evaluations.size(); ++i) {
        if (!evaluations[i].feasible) {
            continue;
        }
        if (best == evaluations.size()) {
            best = i;
            continue;
        }
        const auto& qa = evaluations[i].q;
        const auto& qb = evaluations[best].q;
        if (qa > qb || (qa == qb && evaluations[i].spec.planner_rank <
                                        evaluations[best].spec.planner_rank)) {
            best = i;
        }
    }
    if (best == evaluations.size()) {
        throw std::runtime_error("select_workflow: no feasible workflow");
    }
    return best;
}

double round4(double v) {
    return std::round(v * 10000.0) / 10000.0;
}

RefitOutcome guarded_refit(const WorkflowEvaluation& selected, const EncodingCache& cache,
                           std::uint64_t seed, const DetectorConfig& cfg,
                           double refit_fraction) {
    if (!selected.feasible) {
        throw std::invalid_argument("guarded_refit: selected workflow is infeasible");
    }
    const WorkflowSpec& spec = selected.spec;
    RefitOutcome out;
    out.deployed = selected.detector;

    // Stratified split of V_val into refit and calibration subsets.
    Rng rng(derive_seed(seed, "refit-split"));
    std::vector<std::size_t> refit_ids, cal_ids;
    for (const int cls : {0, 1}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < cache.val_ids.size(); ++i) {
            if (cache.y_val[i] == cls) {
                members.push_back(cache.val_ids[i]);
            }
        }
        rng.shuffle(members);
        const std::size_t n_refit =
            static_cast<std::size_t>(std::floor(refit_fraction * static_cast<double>(members.size())));
        for (std::size_t i = 0; i < members.size(); ++i) {
            (i < n_refit ? refit_ids : cal_ids).push_back(members[i]);
        }
    }
    std::sort(refit_ids.begin(), refit_ids.end());
    std::sort(cal_ids.begin(), cal_ids.end());
    out.decision.refit_ids = refit_ids;
    out.decision.cal_ids = cal_ids;

    const auto labels_of = [&](const std::vector<std::size_t>& ids) {
        std::vector<int> y(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) {
            y[i] = cache.graph->labels[ids[i]] == Label::Anomaly ? 1 : 0;
        }
        return y;
    };
    const std::vector<int> y_cal = labels_of(cal_ids);
    const bool cal_has_both = std::count(y_cal.begin(), y_cal.end(), 1) > 0 &&
                              std::count(y_cal.begin(), y_cal.end(), 0) > 0;
    if (!cal_has_both) {
        out.decision.warning =
            "refit rejected: calibration subset is single-class, guard cannot be evaluated";
        return out;
    }

    try {
        const Matrix z_all = cache.build_z(spec);

        std::vector<std::size_t> train_plus = cache.train_ids;
        train_plus.insert(train_plus.end(), refit_ids.begin(), refit_ids.end());
        std::sort(train_plus.begin(), train_plus.end());
        const DetectorInputs refit_rows = gather_inputs(cache, z_all, spec, train_plus);
        const TrainedDetector refit_det = train_detector(
            spec.detector, refit_rows, labels_of(train_plus), derive_seed(seed, "refit"), cfg);

        const DetectorInputs cal_rows = gather_inputs(cache, z_all, spec, cal_ids);
        const std::vector<double> s_orig = score_detector(selected.detector, cal_rows);
        const std::vector<double> s_refit = score_detector(refit_det, cal_rows);
        const double tau = selected.tau_star; // decision rule frozen

        out.decision.m_orig = {auc(s_orig, y_cal).value,
                               f1_macro(predict_at(s_orig, tau), y_cal)};
        out.decision.m_refit = {auc(s_refit, y_cal).value,
                                f1_macro(predict_at(s_refit, tau), y_cal)};
        out.decision.evaluated = true;

        const std::array<double, 2> r_orig{round4(out.decision.m_orig[0]),
                                           round4(out.decision.m_orig[1])};
        const std::array<double, 2> r_refit{round4(out.decision.m_refit[0]),
                                            round4(out.decision.m_refit[1])};
        out.decision.accepted = r_refit >= r_orig;
        if (out.decision.accepted) {
            out.deployed = refit_det;
        }
    } catch (const std::exception& e) {
        out.decision.warning = std::string("refit rejected: ") + e.what();
    }
    return out;
}

std::vector<int> predict_test(const TrainedDetector& deployed, const WorkflowSpec& spec,
                              const EncodingCache& cache) {
    if (!spec.threshold) {
        throw std::invalid_argument("predict_test: spec has no calibrated threshold");
    }
    const Matrix z_all = cache.build_z(spec);
    const DetectorInputs test_rows = gather_inputs(cache, z_all, spec, cache.test_ids);
    return predict_at(score_detector(deployed, test_rows), *spec.threshold);
}

} // namespace signgad
