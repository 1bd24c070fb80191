// signgad — few-shot graph anomaly detection via workflow search.
//
// Subcommands: stats, plan, run, synth, ablate. Reports are printed as JSON
// to stdout (or --out); stage timings and progress go to stderr.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "signgad/dataset.hpp"
#include "signgad/encoding.hpp"
#include "signgad/pipeline.hpp"

using namespace signgad;
using nlohmann::json;

namespace {

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    RunConfig cfg = path.empty() ? RunConfig{} : parse_config_file(path);
    for (const std::string& entry : overrides) {
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("--set expects key=value, got: " + entry);
        }
        apply_config_entry(cfg, entry.substr(0, eq), entry.substr(eq + 1));
    }
    return cfg;
}

AttributedGraph graph_from_config(const RunConfig& cfg) {
    if (!cfg.dataset_dir.empty()) {
        return load_dataset(cfg.dataset_dir, cfg.train_ratio, cfg.val_fraction, cfg.seed);
    }
    SyntheticSpec synth = cfg.synth;
    synth.seed = cfg.seed;
    synth.train_ratio = cfg.train_ratio;
    synth.val_fraction = cfg.val_fraction;
    return generate_synthetic(synth);
}

void emit(const json& payload, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << payload.dump(2) << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) {
        throw std::runtime_error("cannot open output file " + out_path);
    }
    out << payload.dump(2) << "\n";
}

void log_timings(const Report& report) {
    for (const auto& [stage, seconds] : report.stage_seconds) {
        std::cerr << "[signgad] " << stage << ": " << seconds << " s\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"signgad — few-shot graph anomaly detection workflow engine"};
    app.require_subcommand(1);

    std::string config_path, out_path, dataset_dir, sweep_name, synth_out;
    std::vector<std::string> overrides;

    const auto add_common = [&](CLI::App* cmd, bool config_required) {
        cmd->add_option("config", config_path, "run configuration file (key = value lines)")
            ->required(config_required);
        cmd->add_option("--set", overrides, "override a config entry (key=value), repeatable");
        cmd->add_option("--out", out_path, "write the JSON result to this file");
    };

    CLI::App* cmd_stats = app.add_subcommand("stats", "print graph statistics for a dataset");
    cmd_stats->add_option("dir", dataset_dir, "dataset directory")->required();
    cmd_stats->add_option("--out", out_path, "write the JSON result to this file");

    CLI::App* cmd_plan =
        app.add_subcommand("plan", "print the planned candidate workflow list");
    add_common(cmd_plan, true);

    CLI::App* cmd_run = app.add_subcommand("run", "run the full detection pipeline");
    add_common(cmd_run, true);
    std::string dump_dir;
    cmd_run->add_option("--dump-encodings", dump_dir,
                        "also write phi and the selected workflow's z as binary "
                        "matrices with layout sidecars");

    CLI::App* cmd_synth =
        app.add_subcommand("synth", "generate a synthetic dataset in the dataset layout");
    add_common(cmd_synth, false);
    cmd_synth->add_option("--dir", synth_out, "output dataset directory")->required();

    CLI::App* cmd_ablate = app.add_subcommand("ablate", "run an ablation sweep");
    add_common(cmd_ablate, true);
    cmd_ablate->add_option("--sweep", sweep_name, "K | n_workflows | alpha | modules")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_stats->parsed()) {
            const AttributedGraph g = load_dataset(dataset_dir, 0.01, 0.5, 42);
            emit(stats_to_json(compute_graph_stats(g)), out_path);
        } else if (cmd_plan->parsed()) {
            const RunConfig cfg = load_config(config_path, overrides);
            cfg.validate();
            const AttributedGraph g = graph_from_config(cfg);
            const TaskDescriptor descriptor = build_task_descriptor(cfg.task_text, g);
            std::vector<std::string> warnings;
            std::vector<WorkflowSpec> specs;
            if (cfg.planner == "llm" && !cfg.llm_endpoint.empty()) {
                HttpLlmClient client(
                    LlmOptions{cfg.llm_endpoint, cfg.llm_model, "", cfg.llm_timeout_s});
                specs = plan_llm(descriptor, cfg.n_workflows, client, &warnings);
            } else {
                specs = plan_rule_based(descriptor, cfg.n_workflows);
            }
            json payload;
            payload["workflows"] = json::array();
            for (const WorkflowSpec& spec : specs) {
                payload["workflows"].push_back(workflow_spec_to_json(spec));
            }
            payload["warnings"] = warnings;
            emit(payload, out_path);
        } else if (cmd_run->parsed()) {
            const RunConfig cfg = load_config(config_path, overrides);
            const Report report = run_pipeline(cfg);
            log_timings(report);
            if (!dump_dir.empty()) {
                const AttributedGraph g = graph_from_config(cfg);
                const EncodingCache cache =
                    build_encoding_cache(g, cfg.svd_rank, cfg.epsilon);
                std::filesystem::create_directories(dump_dir);
                export_encoding(dump_dir + "/phi_base.bin", cache.phi_base, g.n_features, 0);
                if (g.n_extra_relations() > 0) {
                    export_encoding(dump_dir + "/phi_fused.bin", cache.phi_fused,
                                    g.n_features, 0);
                }
                const WorkflowSpec& selected =
                    report.evaluations[report.selected_index].spec;
                export_encoding(dump_dir + "/z_selected.bin", cache.build_z(selected),
                                g.n_features, selected.evidence_kinds.size());
                std::cerr << "[signgad] wrote encodings to " << dump_dir << "\n";
            }
            emit(report.to_json(), out_path);
        } else if (cmd_synth->parsed()) {
            RunConfig cfg = load_config(config_path, overrides);
            cfg.dataset_dir.clear(); // synth always generates
            const AttributedGraph g = graph_from_config(cfg);
            save_dataset(synth_out, g);
            std::cerr << "[signgad] wrote synthetic dataset to " << synth_out << "\n";
            emit(stats_to_json(compute_graph_stats(g)), out_path);
        } else if (cmd_ablate->parsed()) {
            const RunConfig cfg = load_config(config_path, overrides);
            const auto reports = ablate(cfg, sweep_name);
            json payload = json::array();
            for (const auto& [label, report] : reports) {
                json entry;
                entry["label"] = label;
                entry["report"] = report.to_json();
                payload.push_back(entry);
                std::cerr << "[signgad] " << label << ": test_auc=" << report.test_auc
                          << " test_f1=" << report.test_f1 << "\n";
            }
            emit(payload, out_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
