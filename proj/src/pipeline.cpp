#include "signgad/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <stdexcept>
#include <thread>

#include "signgad/dataset.hpp"
#include "signgad/rng.hpp"

namespace signgad {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Ablation restrictions applied to the planned candidate list.
std::vector<WorkflowSpec> apply_restrictions(std::vector<WorkflowSpec> specs,
                                             const RunConfig& cfg, std::size_t n_extra) {
    if (cfg.force_k >= 0) {
        const std::vector<EvidenceKind> priority = evidence_priority_order(n_extra);
        const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(cfg.force_k),
                                                    priority.size());
        for (WorkflowSpec& spec : specs) {
            spec.evidence_kinds.assign(priority.begin(),
                                       priority.begin() + static_cast<std::ptrdiff_t>(k));
        }
    }
    if (!cfg.bank_enabled) {
        for (WorkflowSpec& spec : specs) {
            spec.detector = DetectorKind::Linear;
        }
    }
    if (cfg.force_k >= 0 || !cfg.bank_enabled) {
        std::vector<WorkflowSpec> dedup;
        for (const WorkflowSpec& spec : specs) {
            const bool dup = std::any_of(dedup.begin(), dedup.end(), [&](const WorkflowSpec& s) {
                return s.same_choices(spec);
            });
            if (!dup) {
                dedup.push_back(spec);
            }
        }
        specs = std::move(dedup);
    }
    if (!cfg.search_enabled && specs.size() > 1) {
        specs.resize(1); // default workflow only, no validation search
    }
    for (std::size_t i = 0; i < specs.size(); ++i) {
        specs[i].planner_rank = i;
    }
    return specs;
}

} // namespace

json workflow_spec_to_json(const WorkflowSpec& spec) {
    json j;
    j["topology"] = to_string(spec.topology);
    j["detector"] = to_string(spec.detector);
    json evidence = json::array();
    for (const EvidenceKind kind : spec.evidence_kinds) {
        evidence.push_back(to_string(kind));
    }
    j["evidence"] = evidence;
    j["planner_rank"] = spec.planner_rank;
    if (spec.threshold) {
        j["threshold"] = *spec.threshold;
    }
    return j;
}

json stats_to_json(const GraphStats& s) {
    json j;
    j["n_nodes"] = s.n_nodes;
    j["n_relations"] = s.n_relations;
    j["n_extra_relations"] = s.n_extra_relations;
    j["n_edges_per_relation"] = s.n_edges_per_relation;
    j["feature_dim"] = s.feature_dim;
    j["n_train"] = s.n_train;
    j["n_val"] = s.n_val;
    j["n_test"] = s.n_test;
    j["train_anomaly_rate"] = s.train_anomaly_rate;
    j["mean_degree"] = s.mean_degree;
    j["degree_std"] = s.degree_std;
    j["density"] = s.density;
    j["train_edge_homophily"] = s.homophily;
    return j;
}

json config_to_json(const RunConfig& c) {
    json j;
    j["dataset_dir"] = c.dataset_dir;
    j["task_text_file"] = c.task_text_file;
    j["train_ratio"] = c.train_ratio;
    j["val_fraction"] = c.val_fraction;
    j["n_workflows"] = c.n_workflows;
    j["alpha"] = c.alpha;
    j["planner"] = c.planner;
    j["llm_endpoint"] = c.llm_endpoint;
    j["llm_model"] = c.llm_model;
    j["llm_timeout_s"] = c.llm_timeout_s;
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["q_dim"] = c.q_dim;
    j["svd_rank"] = c.svd_rank;
    j["tree_rounds"] = c.tree_rounds;
    j["tree_depth"] = c.tree_depth;
    j["tree_lr"] = c.tree_lr;
    j["tree_min_leaf"] = c.tree_min_leaf;
    j["tree_leaf_lambda"] = c.tree_leaf_lambda;
    j["linear_l2"] = c.linear_l2;
    j["refit_split"] = c.refit_split;
    j["epsilon"] = c.epsilon;
    j["refit_enabled"] = c.refit_enabled;
    j["search_enabled"] = c.search_enabled;
    j["bank_enabled"] = c.bank_enabled;
    j["force_k"] = c.force_k;
    if (c.dataset_dir.empty()) {
        json synth;
        synth["n_nodes"] = c.synth.n_nodes;
        synth["feature_dim"] = c.synth.feature_dim;
        synth["anomaly_rate"] = c.synth.anomaly_rate;
        synth["n_extra_relations"] = c.synth.n_extra_relations;
        synth["homophily"] = c.synth.homophily;
        synth["anomaly_shift"] = c.synth.anomaly_shift;
        synth["anomaly_rewire"] = c.synth.anomaly_rewire;
        synth["seed"] = c.synth.seed;
        synth["train_ratio"] = c.synth.train_ratio;
        synth["val_fraction"] = c.synth.val_fraction;
        j["synthetic"] = synth;
    }
    return j;
}

json Report::to_json() const {
    json j;
    j["schema"] = "signgad-report-v1";
    j["config"] = config_to_json(config);
    j["stats"] = stats_to_json(stats);
    j["planner"]["requested"] = planner_requested;
    j["planner"]["used"] = planner_used;
    j["planner"]["n_candidates"] = evaluations.size();

    json workflows = json::array();
    for (const WorkflowEvaluation& eval : evaluations) {
        json w;
        w["spec"] = workflow_spec_to_json(eval.spec);
        w["feasible"] = eval.feasible;
        if (eval.feasible) {
            w["auc_val"] = eval.auc_val;
            w["f1_val"] = eval.f1_val;
            w["tau_star"] = eval.tau_star;
            w["q"] = {eval.q[0], eval.q[1], eval.q[2]};
            w["penalty"] = eval.penalty;
        } else {
            w["error"] = eval.error;
        }
        if (!eval.warnings.empty()) {
            w["warnings"] = eval.warnings;
        }
        workflows.push_back(w);
    }
    j["workflows"] = workflows;
    j["selected"] = workflow_spec_to_json(evaluations.at(selected_index).spec);

    json r;
    r["enabled"] = refit_enabled;
    r["evaluated"] = refit.evaluated;
    r["accepted"] = refit.accepted;
    if (refit.evaluated) {
        r["m_orig"] = {refit.m_orig[0], refit.m_orig[1]};
        r["m_refit"] = {refit.m_refit[0], refit.m_refit[1]};
    }
    r["n_refit"] = refit.refit_ids.size();
    r["n_cal"] = refit.cal_ids.size();
    if (!refit.warning.empty()) {
        r["warning"] = refit.warning;
    }
    j["refit"] = r;

    j["test"]["auc"] = test_auc;
    j["test"]["f1_macro"] = test_f1;
    j["test"]["n_test"] = n_test;
    j["test"]["n_predicted_anomalies"] = n_predicted_anomalies;
    j["warnings"] = warnings;
    return j;
}

Report run_pipeline_on_graph(const RunConfig& config, const AttributedGraph& graph,
                             LlmClient* client_override) {
    config.validate();
    if (graph.split_ids(Split::Train).empty() || graph.split_ids(Split::Val).empty() ||
        graph.split_ids(Split::Test).empty()) {
        throw std::runtime_error(
            "run_pipeline: graph needs nonempty train, val and test splits");
    }
    Report report;
    report.config = config;
    report.planner_requested = config.planner;
    report.planner_used = "rule";
    const auto t_total = Clock::now();

    // (a) task descriptor
    auto t = Clock::now();
    const TaskDescriptor descriptor = build_task_descriptor(config.task_text, graph);
    report.stats = descriptor.stats;
    report.stage_seconds["stats"] = seconds_since(t);

    // (b) workflow-space planning
    t = Clock::now();
    std::vector<WorkflowSpec> specs;
    if (config.planner == "llm") {
        bool llm_used = false;
        if (client_override != nullptr) {
            specs = plan_llm(descriptor, config.n_workflows, *client_override, &report.warnings,
                             &llm_used);
        } else if (config.llm_endpoint.empty()) {
            report.warnings.push_back(
                "llm planner unavailable, using rule-based planning (no endpoint configured)");
            specs = plan_rule_based(descriptor, config.n_workflows);
        } else {
            HttpLlmClient client(
                LlmOptions{config.llm_endpoint, config.llm_model, "", config.llm_timeout_s});
            specs = plan_llm(descriptor, config.n_workflows, client, &report.warnings, &llm_used);
        }
        report.planner_used = llm_used ? "llm" : "rule";
    } else {
        specs = plan_rule_based(descriptor, config.n_workflows);
    }
    specs = apply_restrictions(std::move(specs), config, descriptor.stats.n_extra_relations);
    report.stage_seconds["plan"] = seconds_since(t);

    // (c)+(d) evidence encoding, detector instantiation, validation search
    t = Clock::now();
    const EncodingCache cache = build_encoding_cache(graph, config.svd_rank, config.epsilon);
    const DetectorConfig det_cfg = config.detector_config();
    report.evaluations.assign(specs.size(), WorkflowEvaluation{});
    {
        std::atomic<std::size_t> next{0};
        const std::size_t n_workers = std::min<std::size_t>(config.workers, specs.size());
        const auto worker = [&]() {
            for (std::size_t i = next.fetch_add(1); i < specs.size(); i = next.fetch_add(1)) {
                report.evaluations[i] =
                    evaluate_workflow(specs[i], cache, config.alpha,
                                      derive_seed(config.seed, "evaluate-workflow", i), det_cfg);
            }
        };
        if (n_workers <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < n_workers; ++w) {
                pool.emplace_back(worker);
            }
            for (std::thread& th : pool) {
                th.join();
            }
        }
    }
    report.selected_index = select_workflow(report.evaluations);
    for (const std::string& w : report.evaluations[report.selected_index].warnings) {
        report.warnings.push_back("selected workflow: " + w);
    }
    report.stage_seconds["evaluate"] = seconds_since(t);

    // (e) guarded final refit
    t = Clock::now();
    const WorkflowEvaluation& selected = report.evaluations[report.selected_index];
    TrainedDetector deployed = selected.detector;
    report.refit_enabled = config.refit_enabled;
    if (config.refit_enabled) {
        RefitOutcome outcome =
            guarded_refit(selected, cache, config.seed, det_cfg, config.refit_split);
        report.refit = std::move(outcome.decision);
        deployed = std::move(outcome.deployed);
        if (!report.refit.warning.empty()) {
            report.warnings.push_back(report.refit.warning);
        }
    }
    report.stage_seconds["refit"] = seconds_since(t);

    // test prediction
    t = Clock::now();
    {
        const Matrix z_all = cache.build_z(selected.spec);
        DetectorInputs test_rows;
        test_rows.z = take_rows(z_all, cache.test_ids);
        if (selected.spec.detector == DetectorKind::RelationAware) {
            for (const Matrix& phi_r : cache.relation_phis) {
                test_rows.relation_phis.push_back(take_rows(phi_r, cache.test_ids));
            }
        }
        const std::vector<double> scores = score_detector(deployed, test_rows);
        const std::vector<int> preds = predict_at(scores, selected.tau_star);
        report.n_test = cache.test_ids.size();
        report.n_predicted_anomalies = 0;
        for (const int p : preds) {
            report.n_predicted_anomalies += static_cast<std::size_t>(p);
        }
        const AucResult a = auc(scores, cache.y_test);
        if (a.single_class) {
            report.warnings.push_back("test AUC degenerate (single class), using 0.5");
        }
        report.test_auc = a.value;
        report.test_f1 = f1_macro(preds, cache.y_test);
    }
    report.stage_seconds["predict"] = seconds_since(t);
    report.stage_seconds["total"] = seconds_since(t_total);
    return report;
}

Report run_pipeline(const RunConfig& config, LlmClient* client_override) {
    RunConfig effective = config;
    const auto t_load = Clock::now();
    AttributedGraph graph;
    if (!config.dataset_dir.empty()) {
        graph = load_dataset(config.dataset_dir, config.train_ratio, config.val_fraction,
                             config.seed);
    } else {
        effective.synth.seed = config.seed;
        effective.synth.train_ratio = config.train_ratio;
        effective.synth.val_fraction = config.val_fraction;
        graph = generate_synthetic(effective.synth);
    }
    const double load_seconds = seconds_since(t_load);
    Report report = run_pipeline_on_graph(effective, graph, client_override);
    report.stage_seconds["load"] = load_seconds;
    report.stage_seconds["total"] += load_seconds;
    return report;
}

std::vector<std::pair<std::string, Report>> ablate(const RunConfig& config,
                                                   const std::string& sweep,
                                                   LlmClient* client_override) {
    std::vector<std::pair<std::string, RunConfig>> points;
    if (sweep == "K") {
        for (const int k : {0, 1, 2, 3, 4, 5, 6}) {
            RunConfig c = config;
            c.force_k = k;
            points.emplace_back("K=" + std::to_string(k), c);
        }
    } else if (sweep == "n_workflows") {
        for (const std::size_t n : {5u, 10u, 20u, 30u}) {
            RunConfig c = config;
            c.n_workflows = n;
            points.emplace_back("n_workflows=" + std::to_string(n), c);
        }
    } else if (sweep == "alpha") {
        for (const double a : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            RunConfig c = config;
            c.alpha = a;
            std::string label = "alpha=" + std::to_string(a);
            label.erase(label.find_last_not_of('0') + 1);
            if (label.back() == '.') {
                label.push_back('0');
            }
            points.emplace_back(label, c);
        }
    } else if (sweep == "modules") {
        points.emplace_back("full", config);
        {
            RunConfig c = config;
            c.planner = "rule";
            points.emplace_back("no_llm", c);
        }
        {
            RunConfig c = config;
            c.force_k = 0;
            points.emplace_back("no_evidence", c);
        }
        {
            RunConfig c = config;
            c.bank_enabled = false;
            points.emplace_back("no_bank", c);
        }
        {
            RunConfig c = config;
            c.search_enabled = false;
            points.emplace_back("no_search", c);
        }
        {
            RunConfig c = config;
            c.refit_enabled = false;
            points.emplace_back("no_refit", c);
        }
    } else {
        throw std::invalid_argument("ablate: unknown sweep '" + sweep +
                                    "' (expected K, n_workflows, alpha or modules)");
    }

    std::vector<std::pair<std::string, Report>> reports;
    reports.reserve(points.size());
    for (const auto& [label, cfg] : points) {
        reports.emplace_back(label, run_pipeline(cfg, client_override));
    }
    return reports;
}

} // namespace signgad
