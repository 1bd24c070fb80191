#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "signgad/config.hpp"
#include "signgad/llm.hpp"
#include "signgad/search.hpp"

namespace signgad {

struct Report {
    RunConfig config; // effective configuration
    GraphStats stats;
    std::string planner_requested; // rule | llm
    std::string planner_used;      // rule | llm (rule when the llm fell back)
    std::vector<WorkflowEvaluation> evaluations;
    std::size_t selected_index = 0;
    bool refit_enabled = true;
    RefitDecision refit;
    double test_auc = 0.0;
    double test_f1 = 0.0;
    std::size_t n_test = 0;
    std::size_t n_predicted_anomalies = 0;
    std::vector<std::string> warnings;

    // Wall-clock per stage. Deliberately excluded from to_json(): the
    // serialized report is byte-identical across runs with the same config
    // and seed, timings go to the log instead.
    std::map<std::string, double> stage_seconds;

    // Canonical deterministic serialization (sorted keys, no timings).
    nlohmann::json to_json() const;
};

// Full pipeline: stats -> descriptor -> plan -> evaluate -> select ->
// guarded refit -> test prediction. `client_override` substitutes the remote
// planner client (tests); otherwise an HTTP client is built from the config
// when planner = llm.
Report run_pipeline(const RunConfig& config, LlmClient* client_override = nullptr);

// Runs the pipeline on an already-built graph (the loading stage is skipped).
Report run_pipeline_on_graph(const RunConfig& config, const AttributedGraph& graph,
                             LlmClient* client_override = nullptr);

// Sweeps: "K" (evidence budget 0..6), "n_workflows" (5/10/20/30), "alpha"
// (0/0.25/0.5/0.75/1), "modules" (full plus the single-component removals
// no_llm / no_evidence / no_bank / no_search / no_refit). One pipeline run
// per point, shared seed schedule.
std::vector<std::pair<std::string, Report>> ablate(const RunConfig& config,
                                                   const std::string& sweep,
                                                   LlmClient* client_override = nullptr);

nlohmann::json stats_to_json(const GraphStats& stats);
nlohmann::json config_to_json(const RunConfig& config);
nlohmann::json workflow_spec_to_json(const WorkflowSpec& spec);

} // namespace signgad
