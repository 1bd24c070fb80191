#include <doctest.h>

#include <algorithm>
#include <random>

#include "signgad/dataset.hpp"
#include "signgad/search.hpp"

using namespace signgad;

namespace {

AttributedGraph small_synthetic(std::uint64_t seed, std::size_t n = 300) {
    SyntheticSpec spec;
    spec.n_nodes = n;
    spec.feature_dim = 6;
    spec.anomaly_rate = 0.1;
    spec.n_extra_relations = 2;
    spec.train_ratio = 0.05;
    spec.seed = seed;
    return generate_synthetic(spec);
}

WorkflowSpec make_spec(Topology topo, DetectorKind det, std::vector<EvidenceKind> kinds) {
    WorkflowSpec spec;
    spec.topology = topo;
    spec.detector = det;
    spec.evidence_kinds = std::move(kinds);
    return spec;
}

} // namespace

TEST_SUITE("search") {

TEST_CASE("cached z equals direct per-workflow assembly") {
    const AttributedGraph g = small_synthetic(55, 150);
    const EncodingCache cache = build_encoding_cache(g, 16, 1e-12);
    WorkflowSpec spec = make_spec(Topology::Fused, DetectorKind::Linear,
                                  {EvidenceKind::DegreeAnomaly,
                                   EvidenceKind::ReconstructionResidual,
                                   EvidenceKind::RelationDegreeProfile,
                                   EvidenceKind::NeighborFeatureDeviation});
    const Matrix z_cached = cache.build_z(spec);

    const GraphView view = make_graph_view(g, Topology::Fused);
    const Matrix phi = graph_context_encoding(g, view);
    const EvidenceMatrix ev =
        assemble_evidence(g, view, spec.evidence_kinds, cache.train_ids);
    const Matrix z_direct = evidence_aware_encoding(phi, ev);

    REQUIRE(z_cached.cols == z_direct.cols);
    CHECK(z_cached.data == z_direct.data); // bitwise
}

TEST_CASE("complexity penalty") {
    CHECK(complexity_penalty(make_spec(Topology::Base, DetectorKind::Linear, {})) == 0.0);
    CHECK(complexity_penalty(make_spec(Topology::Fused, DetectorKind::Tree,
                                       {EvidenceKind::DegreeAnomaly,
                                        EvidenceKind::FeatureSmoothness,
                                        EvidenceKind::NeighborFeatureDeviation,
                                        EvidenceKind::ReconstructionResidual})) == 19.0);
    // componentwise simpler choices give a strictly smaller penalty
    const double simpler = complexity_penalty(
        make_spec(Topology::Base, DetectorKind::Tree, {EvidenceKind::DegreeAnomaly}));
    const double complex_spec = complexity_penalty(
        make_spec(Topology::Fused, DetectorKind::Stacked,
                  {EvidenceKind::DegreeAnomaly, EvidenceKind::FeatureSmoothness}));
    CHECK(simpler < complex_spec);
}

TEST_CASE("evaluate_workflow produces a consistent Q triple") {
    const AttributedGraph g = small_synthetic(21);
    const EncodingCache cache = build_encoding_cache(g, 16, 1e-12);
    const double alpha = 0.5;
    const WorkflowSpec spec = make_spec(Topology::Base, DetectorKind::Linear,
                                        {EvidenceKind::NeighborFeatureDeviation,
                                         EvidenceKind::ReconstructionResidual});
    const WorkflowEvaluation eval = evaluate_workflow(spec, cache, alpha, 7, {});
    REQUIRE(eval.feasible);
    CHECK(eval.auc_val >= 0.0);
    CHECK(eval.auc_val <= 1.0);
    CHECK(eval.f1_val >= 0.0);
    CHECK(eval.f1_val <= 1.0);
    CHECK(eval.q[0] == doctest::Approx(std::min(eval.auc_val, eval.f1_val)).epsilon(1e-12));
    CHECK(eval.q[1] ==
          doctest::Approx(alpha * eval.auc_val + (1 - alpha) * eval.f1_val).epsilon(1e-12));
    CHECK(eval.q[2] == doctest::Approx(-eval.penalty).epsilon(1e-12));
    CHECK(eval.spec.threshold.has_value());

    SUBCASE("alpha blend of equal metrics keeps the value") {
        WorkflowEvaluation fake = eval;
        fake.auc_val = fake.f1_val = 0.7;
        // recompute the blend the same way the implementation does
        const double blended = alpha * fake.auc_val + (1 - alpha) * fake.f1_val;
        CHECK(blended == doctest::Approx(0.7));
    }
}

TEST_CASE("invalid and failing specs are infeasible, not fatal") {
    const AttributedGraph g = small_synthetic(22);
    const EncodingCache cache = build_encoding_cache(g, 16, 1e-12);

    // fused on a multi-relation graph is fine; build a single-relation graph
    SyntheticSpec sspec;
    sspec.n_nodes = 120;
    sspec.feature_dim = 4;
    sspec.anomaly_rate = 0.1;
    sspec.n_extra_relations = 0;
    sspec.train_ratio = 0.1;
    sspec.seed = 5;
    const AttributedGraph single = generate_synthetic(sspec);
    const EncodingCache single_cache = build_encoding_cache(single, 16, 1e-12);

    const WorkflowEvaluation bad = evaluate_workflow(
        make_spec(Topology::Fused, DetectorKind::Linear, {}), single_cache, 0.5, 7, {});
    CHECK_FALSE(bad.feasible);
    CHECK_FALSE(bad.error.empty());

    const WorkflowEvaluation good =
        evaluate_workflow(make_spec(Topology::Base, DetectorKind::Tree, {}), cache, 0.5, 7, {});
    CHECK(good.feasible);
}

TEST_CASE("select_workflow is lexicographic with rank tiebreak") {
    const auto eval_with = [](std::array<double, 3> q, std::size_t rank) {
        WorkflowEvaluation e;
        e.feasible = true;
        e.q = q;
        e.spec.planner_rank = rank;
        return e;
    };
    SUBCASE("third component breaks ties") {
        std::vector<WorkflowEvaluation> evals = {eval_with({0.8, 0.85, -2}, 0),
                                                 eval_with({0.8, 0.85, -1}, 1)};
        CHECK(select_workflow(evals) == 1);
    }
    SUBCASE("first component dominates") {
        std::vector<WorkflowEvaluation> evals = {eval_with({0.81, 0.82, -9}, 1),
                                                 eval_with({0.80, 0.99, -1}, 0)};
        CHECK(select_workflow(evals) == 0);
    }
    SUBCASE("exact tie goes to the lower planner rank") {
        std::vector<WorkflowEvaluation> evals = {eval_with({0.8, 0.85, -1}, 3),
                                                 eval_with({0.8, 0.85, -1}, 1)};
        CHECK(select_workflow(evals) == 1);
    }
    SUBCASE("infeasible entries are skipped and empty sets rejected") {
        std::vector<WorkflowEvaluation> evals = {eval_with({0.9, 0.9, 0}, 0)};
        evals[0].feasible = false;
        CHECK_THROWS(select_workflow(evals));
    }
    SUBCASE("selection is order independent") {
        std::vector<WorkflowEvaluation> evals = {
            eval_with({0.7, 0.8, -1}, 0), eval_with({0.9, 0.85, -3}, 1),
            eval_with({0.9, 0.85, -2}, 2), eval_with({0.2, 0.3, 0}, 3)};
        const std::size_t winner_rank = evals[select_workflow(evals)].spec.planner_rank;
        std::mt19937 rng(4);
        for (int i = 0; i < 10; ++i) {
            std::shuffle(evals.begin(), evals.end(), rng);
            CHECK(evals[select_workflow(evals)].spec.planner_rank == winner_rank);
        }
    }
}

TEST_CASE("guarded refit never degrades rounded calibration metrics") {
    for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const AttributedGraph g = small_synthetic(seed);
        const EncodingCache cache = build_encoding_cache(g, 16, 1e-12);
        const WorkflowSpec spec = make_spec(Topology::Base, DetectorKind::Linear,
                                            {EvidenceKind::NeighborFeatureDeviation,
                                             EvidenceKind::ReconstructionResidual});
        const WorkflowEvaluation eval = evaluate_workflow(spec, cache, 0.5, seed, {});
        REQUIRE(eval.feasible);
        const RefitOutcome outcome = guarded_refit(eval, cache, seed, {});
        REQUIRE(outcome.decision.evaluated);

        // refit/cal partition V_val
        std::vector<std::size_t> joined = outcome.decision.refit_ids;
        joined.insert(joined.end(), outcome.decision.cal_ids.begin(),
                      outcome.decision.cal_ids.end());
        std::sort(joined.begin(), joined.end());
        std::vector<std::size_t> val_sorted = cache.val_ids;
        std::sort(val_sorted.begin(), val_sorted.end());
        CHECK(joined == val_sorted);

        if (outcome.decision.accepted) {
            CHECK(std::array<double, 2>{round4(outcome.decision.m_refit[0]),
                                        round4(outcome.decision.m_refit[1])} >=
                  std::array<double, 2>{round4(outcome.decision.m_orig[0]),
                                        round4(outcome.decision.m_orig[1])});
        } else {
            CHECK(std::array<double, 2>{round4(outcome.decision.m_refit[0]),
                                        round4(outcome.decision.m_refit[1])} <
                  std::array<double, 2>{round4(outcome.decision.m_orig[0]),
                                        round4(outcome.decision.m_orig[1])});
        }
    }
}

TEST_CASE("single-class calibration subset rejects the refit with a warning") {
    // Evaluate on a healthy graph, then run the guard against a cache whose
    // validation labels are all normal: the guard cannot be computed, the
    // refit is rejected and the original detector stays deployed.
    const AttributedGraph g = small_synthetic(44);
    const EncodingCache cache = build_encoding_cache(g, 16, 1e-12);
    const WorkflowSpec spec =
        make_spec(Topology::Base, DetectorKind::Linear, {EvidenceKind::NeighborFeatureDeviation});
    const WorkflowEvaluation eval = evaluate_workflow(spec, cache, 0.5, 7, {});
    REQUIRE(eval.feasible);

    // same dimensions, but every anomaly is placed in train or test
    SyntheticSpec sspec;
    sspec.n_nodes = 300;
    sspec.feature_dim = 6;
    sspec.anomaly_rate = 0.1;
    sspec.n_extra_relations = 2;
    sspec.train_ratio = 0.05;
    sspec.seed = 45;
    AttributedGraph skewed = generate_synthetic(sspec);
    for (std::size_t i = 0; i < skewed.n_nodes; ++i) {
        if (skewed.splits[i] == Split::Val && skewed.labels[i] == Label::Anomaly) {
            skewed.splits[i] = Split::Test; // drain anomalies out of validation
        }
    }
    const EncodingCache skewed_cache = build_encoding_cache(skewed, 16, 1e-12);
    const RefitOutcome outcome = guarded_refit(eval, skewed_cache, 7, {});
    CHECK_FALSE(outcome.decision.evaluated);
    CHECK_FALSE(outcome.decision.accepted);
    CHECK_FALSE(outcome.decision.warning.empty());
}

TEST_CASE("refit acceptance rule on the rounded boundary") {
    // equal rounded metrics must accept (the >= convention)
    CHECK(std::array<double, 2>{round4(0.80004), round4(0.95)} >=
          std::array<double, 2>{round4(0.80001), round4(0.95)});
    // first rounded component smaller must reject
    CHECK_FALSE(std::array<double, 2>{round4(0.8999), round4(0.95)} >=
                std::array<double, 2>{round4(0.9000), round4(0.80)});
    // equal first, bigger second accepts
    CHECK(std::array<double, 2>{round4(0.9000), round4(0.81)} >=
          std::array<double, 2>{round4(0.9000), round4(0.80)});
}

TEST_CASE("predict_test applies the calibrated threshold with >=") {
    const AttributedGraph g = small_synthetic(33);
    const EncodingCache cache = build_encoding_cache(g, 16, 1e-12);
    const WorkflowSpec spec =
        make_spec(Topology::Base, DetectorKind::Linear, {EvidenceKind::NeighborFeatureDeviation});
    const WorkflowEvaluation eval = evaluate_workflow(spec, cache, 0.5, 7, {});
    REQUIRE(eval.feasible);
    const std::vector<int> preds = predict_test(eval.detector, eval.spec, cache);
    CHECK(preds.size() == cache.test_ids.size());

    // recompute scores and compare the >= rule, including the boundary
    const Matrix z_all = cache.build_z(eval.spec);
    DetectorInputs rows;
    rows.z = take_rows(z_all, cache.test_ids);
    const std::vector<double> scores = score_detector(eval.detector, rows);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        CHECK(preds[i] == (scores[i] >= *eval.spec.threshold ? 1 : 0));
    }

    SUBCASE("scores below tau give all-normal") {
        const std::vector<int> all_normal = predict_at({0.0, 0.1}, 0.5);
        CHECK(all_normal == std::vector<int>{0, 0});
        const std::vector<int> boundary = predict_at({0.5}, 0.5);
        CHECK(boundary == std::vector<int>{1}); // s == tau predicts anomaly
    }
}

TEST_CASE("monotone score transform with recalibration keeps the test labeling") {
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> val_scores(40), test_scores(25);
    std::vector<int> val_labels(40);
    for (std::size_t i = 0; i < val_scores.size(); ++i) {
        val_scores[i] = unif(rng);
        val_labels[i] = rng() % 2;
    }
    val_labels[0] = 1;
    val_labels[1] = 0;
    for (double& s : test_scores) {
        s = unif(rng);
    }
    const auto transform = [](double s) { return s * s * 0.5 + 0.2; }; // strictly increasing
    std::vector<double> val_mapped(val_scores.size()), test_mapped(test_scores.size());
    std::transform(val_scores.begin(), val_scores.end(), val_mapped.begin(), transform);
    std::transform(test_scores.begin(), test_scores.end(), test_mapped.begin(), transform);

    const Calibration c1 = calibrate_threshold(val_scores, val_labels);
    const Calibration c2 = calibrate_threshold(val_mapped, val_labels);
    CHECK(predict_at(test_scores, c1.tau) == predict_at(test_mapped, c2.tau));
}

} // TEST_SUITE
