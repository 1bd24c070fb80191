#pragma once

#include <memory>
#include <string>
#include <vector>

#include "signgad/planner.hpp"

namespace signgad {

struct LlmResult {
    bool ok = false;
    std::string content; // assistant message text when ok
    std::string error;   // transport / protocol diagnostic when !ok
};

// One-shot completion client. The pipeline only ever issues a single planning
// request per run; there is no multi-turn loop.
class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual LlmResult complete(const std::string& system_prompt,
                               const std::string& user_prompt) = 0;
};

struct LlmOptions {
    std::string endpoint;           // e.g. https://api.example.com/v1/chat/completions
    std::string model = "gpt-4.1";
    std::string api_key;            // from SIGNGAD_LLM_API_KEY when empty
    double timeout_seconds = 30.0;
};

// Chat-completions-style HTTP client (OpenAI wire format).
class HttpLlmClient : public LlmClient {
public:
    explicit HttpLlmClient(LlmOptions options);
    LlmResult complete(const std::string& system_prompt, const std::string& user_prompt) override;

private:
    LlmOptions options_;
};

// Prompt pair sent to the planner model; the user prompt embeds the task
// descriptor and the workflow-spec response schema (workflow-spec-v1).
std::string planner_system_prompt();
std::string planner_user_prompt(const TaskDescriptor& descriptor, std::size_t n_workflows);

// Extracts and validates workflow specs from a model response. Invalid or
// malformed entries are dropped (reasons appended to `notes` when given).
std::vector<WorkflowSpec> parse_workflow_specs(const std::string& content,
                                               std::size_t n_extra_relations,
                                               std::vector<std::string>* notes = nullptr);

// LLM-guided planning with schema validation and rule-based padding. Any
// transport or parse failure falls back to plan_rule_based; the pipeline
// never sees an error, only warnings. `llm_used` reports whether any
// model-proposed spec survived validation.
std::vector<WorkflowSpec> plan_llm(const TaskDescriptor& descriptor, std::size_t n_workflows,
                                   LlmClient& client, std::vector<std::string>* warnings = nullptr,
                                   bool* llm_used = nullptr);

} // namespace signgad
