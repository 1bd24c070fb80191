#include "signgad/llm.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#ifdef SIGNGAD_WITH_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <json.hpp>

namespace signgad {

using nlohmann::json;

HttpLlmClient::HttpLlmClient(LlmOptions options) : options_(std::move(options)) {
    if (options_.api_key.empty()) {
        if (const char* env = std::getenv("SIGNGAD_LLM_API_KEY")) {
            options_.api_key = env;
        }
    }
}

namespace {

struct ParsedUrl {
    std::string base; // scheme://host[:port]
    std::string path; // /v1/...
    bool valid = false;
};

ParsedUrl split_url(const std::string& url) {
    ParsedUrl out;
    const std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        return out;
    }
    const std::size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        out.base = url;
        out.path = "/";
    } else {
        out.base = url.substr(0, path_start);
        out.path = url.substr(path_start);
    }
    out.valid = true;
    return out;
}

} // namespace

LlmResult HttpLlmClient::complete(const std::string& system_prompt,
                                  const std::string& user_prompt) {
    const ParsedUrl url = split_url(options_.endpoint);
    if (!url.valid) {
        return {false, {}, "invalid endpoint url: " + options_.endpoint};
    }
#ifndef SIGNGAD_WITH_TLS
    if (url.base.rfind("https://", 0) == 0) {
        return {false, {}, "https endpoint requires a TLS-enabled build"};
    }
#endif

    httplib::Client cli(url.base);
    const auto timeout = std::chrono::milliseconds(
        static_cast<long long>(options_.timeout_seconds * 1000.0));
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    cli.set_follow_location(true);

    httplib::Headers headers;
    if (!options_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + options_.api_key);
    }

    json body;
    body["model"] = options_.model;
    body["temperature"] = 0;
    body["messages"] = json::array({
        json{{"role", "system"}, {"content", system_prompt}},
        json{{"role", "user"}, {"content", user_prompt}},
    });

    const httplib::Result res = cli.Post(url.path, headers, body.dump(), "application/json");
    if (!res) {
        std::ostringstream err;
        err << "transport error: " << httplib::to_string(res.error());
        return {false, {}, err.str()};
    }
    if (res->status != 200) {
        return {false, {}, "http status " + std::to_string(res->status)};
    }
    try {
        const json parsed = json::parse(res->body);
        return {true, parsed.at("choices").at(0).at("message").at("content").get<std::string>(),
                {}};
    } catch (const std::exception& e) {
        return {false, {}, std::string("response parse error: ") + e.what()};
    }
}

std::string planner_system_prompt() {
    return "You design node-level graph anomaly detection workflows. "
           "Reply with a JSON array only, no prose.";
}

std::string planner_user_prompt(const TaskDescriptor& descriptor, std::size_t n_workflows) {
    const GraphStats& s = descriptor.stats;
    json stats;
    stats["n_nodes"] = s.n_nodes;
    stats["n_relations"] = s.n_relations;
    stats["n_edges_per_relation"] = s.n_edges_per_relation;
    stats["feature_dim"] = s.feature_dim;
    stats["n_train"] = s.n_train;
    stats["n_val"] = s.n_val;
    stats["n_test"] = s.n_test;
    stats["train_anomaly_rate"] = s.train_anomaly_rate;
    stats["mean_degree"] = s.mean_degree;
    stats["degree_std"] = s.degree_std;
    stats["density"] = s.density;
    stats["train_edge_homophily"] = s.homophily;

    std::ostringstream out;
    out << "Task description:\n"
        << (descriptor.task_text.empty() ? "(none provided)" : descriptor.task_text) << "\n\n"
        << "Graph statistics:\n" << stats.dump(2) << "\n\n"
        << "Supervision budget (labeled training nodes): " << descriptor.supervision_budget
        << "\n\n"
        << "Propose up to " << n_workflows << " candidate detection workflows, ordered from "
        << "most to least promising for this task. Respond with a JSON array conforming to "
        << "schema workflow-spec-v1: each element is an object with keys\n"
        << "  \"topology\": \"base\" or \"fused\" (\"fused\" only when n_relations > 1),\n"
        << "  \"evidence\": array (possibly empty, no duplicates) drawn from\n"
        << "    [\"degree_anomaly\", \"relation_degree_profile\", \"relation_disagreement\",\n"
        << "     \"neighbor_feature_deviation\", \"feature_smoothness\", "
           "\"reconstruction_residual\"]\n"
        << "    (the two relation_* kinds only when n_relations > 1),\n"
        << "  \"detector\": one of \"linear\", \"tree\", \"stacked\", \"relation_aware\"\n"
        << "    (\"relation_aware\" only when n_relations > 1).\n"
        << "No other keys. JSON array only.";
    return out.str();
}

std::vector<WorkflowSpec> parse_workflow_specs(const std::string& content,
                                               std::size_t n_extra_relations,
                                               std::vector<std::string>* notes) {
    const auto note = [&](const std::string& msg) {
        if (notes != nullptr) {
            notes->push_back(msg);
        }
    };

    // Models sometimes wrap the array in prose or code fences; take the
    // outermost bracketed span.
    const std::size_t open = content.find('[');
    const std::size_t close = content.rfind(']');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        note("no JSON array found in response");
        return {};
    }

    json parsed;
    try {
        parsed = json::parse(content.substr(open, close - open + 1));
    } catch (const std::exception& e) {
        note(std::string("JSON parse error: ") + e.what());
        return {};
    }
    if (!parsed.is_array()) {
        note("response is not a JSON array");
        return {};
    }

    std::vector<WorkflowSpec> specs;
    for (const json& item : parsed) {
        try {
            if (!item.is_object()) {
                throw std::invalid_argument("entry is not an object");
            }
            WorkflowSpec spec;
            spec.topology = topology_from_string(item.at("topology").get<std::string>());
            spec.detector = detector_kind_from_string(item.at("detector").get<std::string>());
            for (const json& kind : item.at("evidence")) {
                spec.evidence_kinds.push_back(
                    evidence_kind_from_string(kind.get<std::string>()));
            }
            const std::vector<std::string> violations = validate_spec(spec, n_extra_relations);
            if (!violations.empty()) {
                note("dropped invalid spec: " + violations.front());
                continue;
            }
            specs.push_back(std::move(spec));
        } catch (const std::exception& e) {
            note(std::string("dropped malformed spec: ") + e.what());
        }
    }
    return specs;
}

std::vector<WorkflowSpec> plan_llm(const TaskDescriptor& descriptor, std::size_t n_workflows,
                                   LlmClient& client, std::vector<std::string>* warnings,
                                   bool* llm_used) {
    const auto warn = [&](const std::string& msg) {
        if (warnings != nullptr) {
            warnings->push_back(msg);
        }
    };
    if (llm_used != nullptr) {
        *llm_used = false;
    }
    const std::vector<WorkflowSpec> fallback = plan_rule_based(descriptor, n_workflows);

    const LlmResult result =
        client.complete(planner_system_prompt(), planner_user_prompt(descriptor, n_workflows));
    if (!result.ok) {
        warn("llm planner unavailable, using rule-based planning (" + result.error + ")");
        return fallback;
    }

    std::vector<std::string> notes;
    std::vector<WorkflowSpec> specs =
        parse_workflow_specs(result.content, descriptor.stats.n_extra_relations, &notes);
    for (const std::string& n : notes) {
        warn("llm planner: " + n);
    }
    if (specs.empty()) {
        warn("llm planner returned no valid workflow, using rule-based planning");
        return fallback;
    }
    if (llm_used != nullptr) {
        *llm_used = true;
    }

    // De-duplicate LLM proposals, then pad from the rule-based grid.
    std::vector<WorkflowSpec> out;
    for (const WorkflowSpec& spec : specs) {
        const bool dup = std::any_of(out.begin(), out.end(), [&](const WorkflowSpec& s) {
            return s.same_choices(spec);
        });
        if (!dup && out.size() < n_workflows) {
            out.push_back(spec);
        }
    }
    for (const WorkflowSpec& spec : fallback) {
        if (out.size() >= n_workflows) {
            break;
        }
        const bool dup = std::any_of(out.begin(), out.end(), [&](const WorkflowSpec& s) {
            return s.same_choices(spec);
        });
        if (!dup) {
            out.push_back(spec);
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].planner_rank = i;
    }
    return out;
}

} // namespace signgad
