#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "collab/agent/tools.hpp"
#include "collab/core/error.hpp"
#include "collab/gen/provider.hpp"

namespace collab::agent {

inline constexpr std::size_t kMaxCallsPerIteration = 8;

enum class StopReason { finished, iteration_cap };
std::string_view to_string(StopReason r);

struct Iteration {
    std::string reasoning;
    std::vector<ToolCall> calls;
    std::vector<ToolResult> results;  // parallel to calls
    // Set when the step output could not be used; the iteration still counts.
    std::optional<std::string> step_error;
};

struct AgentTrace {
    std::string query;
    int max_iterations = 8;
    KindSet allowed_kinds = KindSet::all();
    bool baseline_mode = false;
    std::vector<Iteration> iterations;
    std::optional<StopReason> stopped_reason;  // absent only in a failed run's partial trace
    std::string synthesis;
    std::vector<Citation> citations;   // sorted, unique, each backed by a successful result
    std::vector<json> dropped_citations;  // requested by the provider but not backed by the trace
    bool uncited = false;
    bool evidence_limited = false;

    // True when (discussion_id, kind) appears in the evidence of a successful result.
    bool backs(const Citation& c) const;
};

// Canonical JSON, no timestamps: the same run always serializes to the same bytes.
json to_json(const AgentTrace& t);

class AgentFailed : public Error {
public:
    AgentFailed(const std::string& message, AgentTrace partial)
        : Error(Errc::agent_failed, message), trace_(std::move(partial)) {}
    const AgentTrace& trace() const { return trace_; }

private:
    AgentTrace trace_;
};

struct RunOptions {
    gen::RetryPolicy retry;
};

// Bounded loop: at most cfg.max_iterations agent_step requests, then exactly one
// synthesis request. Tool failures and unusable step outputs are recorded and
// shown to the provider on the next step. Provider errors throw AgentFailed.
AgentTrace run_agent(const std::string& query, const AgentConfig& cfg, gen::GenerationProvider& provider,
                     const ToolContext& ctx, const RunOptions& options = {});

gen::GenerationRequest agent_step_request(const std::string& query, const AgentConfig& cfg,
                                          const std::vector<Iteration>& history);
gen::GenerationRequest synthesis_request(const std::string& query, const AgentConfig& cfg,
                                         const std::vector<Iteration>& history, StopReason reason);

// What a scripted provider can read back out of an agent_step or synthesis prompt.
struct PromptView {
    std::string query;
    int iteration = 0;  // 1-based step number; 0 for synthesis
    int max_iterations = 0;
    std::vector<std::string> tools;  // offered tool names
    json evidence = json::array();   // prior iterations as rendered into the prompt
    std::optional<StopReason> stopped_reason;
};
PromptView parse_prompt_view(const gen::GenerationRequest& request);

}  // namespace collab::agent
