#include "collab/agent/agent.hpp"

#include <algorithm>
#include <cstdio>

#include "collab/core/json_io.hpp"
#include "collab/core/text.hpp"
#include "collab/gen/prompts.hpp"
#include "collab/gen/schemas.hpp"

namespace collab::agent {

namespace {

constexpr std::string_view kStepSystem =
    "You are an analyst assistant that answers questions about recorded small-group discussions. "
    "You gather evidence by calling the tools listed below, one step at a time. "
    "When the evidence gathered so far is enough to answer, finish. "
    "Answer each step with a single JSON document and nothing else.";

constexpr std::string_view kSynthesisSystem =
    "You answer questions about recorded small-group discussions using only the evidence provided. "
    "Every claim must be traceable to a cited artifact. "
    "Answer with a single JSON document and nothing else.";

// Payload as it appears in the next prompt: cut to the budget, never in the trace.
json prompt_result(const ToolCall& call, const ToolResult& r, std::size_t budget) {
    json out = to_json(r);
    out["arguments"] = call.arguments;
    if (r.ok) {
        const auto text = canonical_dump(r.payload);
        if (text::codepoint_length(text) > budget) {
            out.erase("payload");
            out["payload_truncated"] = text::truncate_with_ellipsis(text, budget);
        }
    }
    return out;
}

json render_history(const std::vector<Iteration>& history, std::size_t budget) {
    json out = json::array();
    for (std::size_t i = 0; i < history.size(); ++i) {
        const auto& it = history[i];
        json results = json::array();
        for (std::size_t c = 0; c < it.results.size(); ++c) {
            results.push_back(prompt_result(it.calls[c], it.results[c], budget));
        }
        json entry{{"iteration", i + 1}, {"reasoning", it.reasoning}, {"results", results}};
        if (it.step_error) entry["step_error"] = *it.step_error;
        out.push_back(std::move(entry));
    }
    return out;
}

std::string kinds_line(KindSet set) {
    std::string out;
    for (auto k : set.members()) {
        if (!out.empty()) out += ", ";
        out += to_string(k);
    }
    return out;
}

// Reads the step output into `it`, or records why it cannot be used.
void read_step(const json& v, Iteration& it, bool& finished) {
    if (const auto problems = gen::schema::shape_problems(gen::schema::kAgentStep, v); !problems.empty()) {
        std::string note = "unusable step output:";
        for (const auto& p : problems) note += " " + p + ";";
        it.step_error = note;
        return;
    }
    if (v.contains("reasoning") && v["reasoning"].is_string()) it.reasoning = v["reasoning"].get<std::string>();
    if (v["action"] == "finish") {
        finished = true;
        return;
    }
    for (const auto& c : v["calls"]) {
        it.calls.push_back({c["tool"].get<std::string>(), c.value("arguments", json::object())});
    }
}

gen::GenerationResponse call_provider(gen::GenerationProvider& provider, const gen::GenerationRequest& request,
                                      const RunOptions& options, AgentTrace& trace, const char* what) {
    try {
        return gen::generate_with_retry(provider, request, options.retry);
    } catch (const std::exception& e) {
        throw AgentFailed(std::string(what) + " failed: " + e.what(), trace);
    }
}

}  // namespace

std::string_view to_string(StopReason r) { return r == StopReason::finished ? "finished" : "iteration_cap"; }

bool AgentTrace::backs(const Citation& c) const {
    for (const auto& it : iterations) {
        for (const auto& r : it.results) {
            if (r.ok && std::binary_search(r.evidence.begin(), r.evidence.end(), c)) return true;
        }
    }
    return false;
}

json to_json(const AgentTrace& t) {
    json iterations = json::array();
    for (const auto& it : t.iterations) {
        json calls = json::array();
        json results = json::array();
        for (const auto& c : it.calls) calls.push_back(to_json(c));
        for (const auto& r : it.results) results.push_back(to_json(r));
        iterations.push_back({{"reasoning_text", it.reasoning},
                              {"tool_calls", calls},
                              {"tool_results", results},
                              {"step_error", it.step_error ? json(*it.step_error) : json(nullptr)}});
    }
    json citations = json::array();
    for (const auto& c : t.citations) citations.push_back(to_json(c));
    json kinds = json::array();
    for (auto k : t.allowed_kinds.members()) kinds.push_back(to_string(k));
    return json{{"query", t.query},
                {"config", {{"max_iterations", t.max_iterations}, {"allowed_kinds", kinds}, {"baseline_mode", t.baseline_mode}}},
                {"iterations", iterations},
                {"stopped_reason", t.stopped_reason ? json(to_string(*t.stopped_reason)) : json(nullptr)},
                {"synthesis", t.synthesis},
                {"citations", citations},
                {"dropped_citations", t.dropped_citations},
                {"flags", {{"uncited", t.uncited}, {"evidence_limited", t.evidence_limited}}}};
}

gen::GenerationRequest agent_step_request(const std::string& query, const AgentConfig& cfg,
                                          const std::vector<Iteration>& history) {
    gen::GenerationRequest r;
    r.prompt_kind = gen::PromptKind::agent_step;
    r.schema_id = std::string(gen::schema::kAgentStep);
    r.max_output_tokens = 1024;
    r.system_text = std::string(kStepSystem) + "\n\n" +
                    gen::tagged_block("tools", pretty_dump(tool_schemas(cfg)));
    r.user_text =
        gen::tagged_block("query", query) + "\n" +
        gen::tagged_block("step", std::to_string(history.size() + 1) + " of " + std::to_string(cfg.max_iterations)) +
        "\n" + gen::tagged_block("allowed_kinds", kinds_line(cfg.allowed_kinds)) + "\n" +
        gen::tagged_block("evidence", canonical_dump(render_history(history, cfg.result_char_budget))) +
        "\n\nCall up to " + std::to_string(kMaxCallsPerIteration) +
        " tools, or finish when the evidence is enough.\nOutput schema:\n" +
        gen::tagged_block("schema", gen::schema::describe(gen::schema::kAgentStep));
    return r;
}

gen::GenerationRequest synthesis_request(const std::string& query, const AgentConfig& cfg,
                                         const std::vector<Iteration>& history, StopReason reason) {
    gen::GenerationRequest r;
    r.prompt_kind = gen::PromptKind::synthesis;
    r.schema_id = std::string(gen::schema::kSynthesis);
    r.max_output_tokens = 2048;
    r.system_text = std::string(kSynthesisSystem);
    std::string guidance =
        "Answer the query from the evidence. Cite every artifact you rely on as a (discussion_id, kind) pair "
        "taken from the evidence lists of successful tool results.";
    if (reason == StopReason::iteration_cap) {
        guidance += " Evidence gathering stopped at the step limit, so say where the evidence is incomplete.";
    }
    r.user_text = gen::tagged_block("query", query) + "\n" +
                  gen::tagged_block("stopped_reason", std::string(to_string(reason))) + "\n" +
                  gen::tagged_block("evidence", canonical_dump(render_history(history, cfg.result_char_budget))) +
                  "\n\n" + guidance + "\nOutput schema:\n" +
                  gen::tagged_block("schema", gen::schema::describe(gen::schema::kSynthesis));
    return r;
}

PromptView parse_prompt_view(const gen::GenerationRequest& request) {
    PromptView v;
    v.query = gen::extract_block(request.user_text, "query").value_or("");
    if (const auto step = gen::extract_block(request.user_text, "step")) {
        if (std::sscanf(step->c_str(), "%d of %d", &v.iteration, &v.max_iterations) != 2) {
            v.iteration = v.max_iterations = 0;
        }
    }
    if (const auto tools = gen::extract_block(request.system_text, "tools")) {
        for (const auto& t : json::parse(*tools)) v.tools.push_back(t["name"].get<std::string>());
    }
    if (const auto evidence = gen::extract_block(request.user_text, "evidence")) {
        v.evidence = json::parse(*evidence);
    }
    if (const auto reason = gen::extract_block(request.user_text, "stopped_reason")) {
        v.stopped_reason = *reason == "finished" ? StopReason::finished : StopReason::iteration_cap;
    }
    return v;
}

AgentTrace run_agent(const std::string& query, const AgentConfig& cfg, gen::GenerationProvider& provider,
                     const ToolContext& ctx, const RunOptions& options) {
    if (text::trim(query).empty()) throw Error(Errc::invalid_argument, "query must be non-empty");
    cfg.check();

    AgentTrace trace;
    trace.query = query;
    trace.max_iterations = cfg.max_iterations;
    trace.allowed_kinds = cfg.allowed_kinds;
    trace.baseline_mode = cfg.baseline_mode;

    bool finished = false;
    while (!finished && static_cast<int>(trace.iterations.size()) < cfg.max_iterations) {
        const auto request = agent_step_request(query, cfg, trace.iterations);
        const auto response = call_provider(provider, request, options, trace, "agent step");
        Iteration it;
        if (const auto v = gen::structured_output(response)) {
            read_step(*v, it, finished);
        } else {
            it.step_error = "unusable step output: not a JSON document";
        }
        std::size_t n = 0;
        for (const auto& call : it.calls) {
            if (++n > kMaxCallsPerIteration) {
                it.results.push_back({call.tool, false, nullptr, "too many tool calls in one step", {}});
                continue;
            }
            it.results.push_back(dispatch_tool(call, cfg, ctx));
        }
        trace.iterations.push_back(std::move(it));
    }
    trace.stopped_reason = finished ? StopReason::finished : StopReason::iteration_cap;
    trace.evidence_limited = !finished;

    const auto request = synthesis_request(query, cfg, trace.iterations, *trace.stopped_reason);
    const auto response = call_provider(provider, request, options, trace, "synthesis");
    const auto v = gen::structured_output(response);
    if (v && gen::schema::shape_problems(gen::schema::kSynthesis, *v).empty()) {
        trace.synthesis = (*v)["answer"].get<std::string>();
        for (const auto& c : v->value("citations", json::array())) {
            Citation cite;
            bool parsed = c.is_object() && c.contains("discussion_id") && c["discussion_id"].is_string() &&
                          c.contains("kind") && c["kind"].is_string();
            if (parsed) {
                const auto kind = parse_artifact_kind(c["kind"].get<std::string>());
                parsed = kind.has_value();
                if (parsed) cite = {c["discussion_id"].get<std::string>(), *kind};
            }
            if (parsed && trace.backs(cite)) {
                trace.citations.push_back(cite);
            } else {
                trace.dropped_citations.push_back(c);
            }
        }
    } else {
        trace.synthesis = std::string(text::trim(response.raw_text));
        if (trace.synthesis.empty()) throw AgentFailed("synthesis returned no answer", trace);
    }
    std::sort(trace.citations.begin(), trace.citations.end());
    trace.citations.erase(std::unique(trace.citations.begin(), trace.citations.end()), trace.citations.end());
    trace.uncited = trace.citations.empty();
    return trace;
}

}  // namespace collab::agent
