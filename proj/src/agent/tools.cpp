#include "collab/agent/tools.hpp"

#include <algorithm>
#include <set>

#include "collab/agent/profile.hpp"
#include "collab/core/error.hpp"
#include "collab/core/json_io.hpp"

namespace collab::agent {

namespace {

struct ParamSpec {
    const char* name;
    const char* type;  // "string" only for now
    const char* description;
};

struct ToolSpec {
    Tool tool;
    const char* description;
    std::vector<ParamSpec> params;
};

const std::vector<ToolSpec>& specs() {
    static const std::vector<ToolSpec> s = {
        {Tool::search_sessions,
         "Semantic search over the indexed artifact collections the user allowed. Returns the most relevant "
         "discussions with the collections that matched.",
         {{"query", "string", "what to look for"}}},
        {Tool::list_sessions, "Lists every session with its discussions, titles, durations and metadata.", {}},
        {Tool::get_transcript,
         "Fetches a discussion transcript with per-utterance psycholinguistic metrics.",
         {{"discussion_id", "string", "discussion to fetch"}}},
        {Tool::get_concept_map, "Fetches the concept map of a discussion.",
         {{"discussion_id", "string", "discussion to fetch"}}},
        {Tool::get_assessment,
         "Fetches the seven-dimension collaboration assessment of a discussion: scores, analyses and evidence.",
         {{"discussion_id", "string", "discussion to fetch"}}},
        {Tool::get_speaker_profile,
         "Summarizes one participant across sessions: participation share, concept contributions and "
         "psycholinguistic metrics.",
         {{"speaker_id", "string", "participant to profile"}}},
    };
    return s;
}

const ToolSpec& spec(Tool t) { return specs()[static_cast<std::size_t>(t)]; }

ToolResult failure(std::string tool, std::string note) {
    ToolResult r;
    r.tool = std::move(tool);
    r.ok = false;
    r.payload = nullptr;
    r.error_note = std::move(note);
    return r;
}

ToolResult success(Tool t, json payload, std::vector<Citation> evidence) {
    std::sort(evidence.begin(), evidence.end());
    evidence.erase(std::unique(evidence.begin(), evidence.end()), evidence.end());
    ToolResult r;
    r.tool = std::string(to_string(t));
    r.ok = true;
    r.payload = std::move(payload);
    r.evidence = std::move(evidence);
    return r;
}

// Empty string when the arguments match the declared parameters exactly.
std::string argument_problem(const ToolSpec& s, const json& args) {
    if (!args.is_object()) return "arguments must be an object";
    for (const auto& p : s.params) {
        const auto it = args.find(p.name);
        if (it == args.end()) return std::string("missing required argument \"") + p.name + "\"";
        if (!it->is_string()) return std::string("argument \"") + p.name + "\" must be a string";
        if (it->get<std::string>().empty()) return std::string("argument \"") + p.name + "\" must be non-empty";
    }
    for (const auto& [key, value] : args.items()) {
        const bool known = std::any_of(s.params.begin(), s.params.end(), [&](const ParamSpec& p) { return key == p.name; });
        if (!known) return "unexpected argument \"" + key + "\"";
    }
    return {};
}

json kinds_json(KindSet set) {
    json out = json::array();
    for (auto k : set.members()) out.push_back(to_string(k));
    return out;
}

ToolResult run_search(const json& args, const AgentConfig& cfg, const ToolContext& ctx) {
    auto fusion = cfg.fusion;
    fusion.allowed_kinds = cfg.allowed_kinds;
    const auto query = args["query"].get<std::string>();
    const auto hits = ctx.retriever.search_sessions(query, fusion);
    json out = json::array();
    std::vector<Citation> evidence;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        json contributions = json::array();
        for (const auto& c : hits[i].contributions) {
            contributions.push_back({{"kind", to_string(c.kind)}, {"rank", c.rank}, {"similarity", c.similarity}});
            evidence.push_back({hits[i].discussion_id, c.kind});
        }
        out.push_back({{"rank", i + 1},
                       {"discussion_id", hits[i].discussion_id},
                       {"score", hits[i].score},
                       {"contributions", contributions}});
    }
    return success(Tool::search_sessions,
                   {{"query", query}, {"allowed_kinds", kinds_json(fusion.allowed_kinds)}, {"hits", out}},
                   std::move(evidence));
}

ToolResult run_list(const ToolContext& ctx) {
    json sessions = json::array();
    for (const auto& s : ctx.repo.sessions()) {
        json discussions = json::array();
        for (const auto& did : s.discussion_ids) {
            const auto d = ctx.repo.discussion(did);
            if (!d) continue;
            discussions.push_back(
                {{"discussion_id", d->discussion_id}, {"group_label", d->group_label}, {"duration_ms", d->duration_ms}});
        }
        json metadata = json::object();
        for (const auto& [k, v] : s.metadata) metadata[k] = v;
        sessions.push_back({{"session_id", s.session_id},
                            {"title", s.title},
                            {"started_at", format_iso8601(s.started_at)},
                            {"metadata", metadata},
                            {"discussions", discussions}});
    }
    return success(Tool::list_sessions, {{"sessions", sessions}}, {});
}

ToolResult run_transcript(const std::string& did, const ToolContext& ctx) {
    const auto t = ctx.repo.transcript(did);
    if (!t) return failure(std::string(to_string(Tool::get_transcript)), "unknown discussion " + did);
    const auto metrics = ctx.repo.metrics(did);
    const bool have_metrics = metrics && metrics->values.size() == t->utterances.size();
    json utterances = json::array();
    for (std::size_t i = 0; i < t->utterances.size(); ++i) {
        json u = t->utterances[i];
        json row = json::object();
        if (have_metrics) {
            for (std::size_t c = 0; c < metrics->metric_names.size() && c < metrics->values[i].size(); ++c) {
                row[metrics->metric_names[c]] = metrics->values[i][c];
            }
        }
        u["metrics"] = row;
        utterances.push_back(std::move(u));
    }
    json payload{{"discussion_id", did},
                 {"metric_names", have_metrics ? json(metrics->metric_names) : json::array()},
                 {"utterances", utterances}};
    if (!have_metrics) payload["notice"] = "psycholinguistic metrics not computed for this discussion";
    return success(Tool::get_transcript, std::move(payload), {{did, ArtifactKind::transcript}});
}

}  // namespace

std::string_view to_string(Tool t) {
    switch (t) {
        case Tool::search_sessions: return "search_sessions";
        case Tool::list_sessions: return "list_sessions";
        case Tool::get_transcript: return "get_transcript";
        case Tool::get_concept_map: return "get_concept_map";
        case Tool::get_assessment: return "get_assessment";
        case Tool::get_speaker_profile: return "get_speaker_profile";
    }
    return "";
}

std::optional<Tool> parse_tool(std::string_view s) {
    for (auto t : kAllTools) {
        if (to_string(t) == s) return t;
    }
    return std::nullopt;
}

AgentConfig AgentConfig::baseline() {
    AgentConfig c;
    c.baseline_mode = true;
    c.allowed_kinds = KindSet::only(ArtifactKind::transcript);
    return c;
}

void AgentConfig::check() const {
    if (max_iterations < 1 || max_iterations > 8) {
        throw Error(Errc::invalid_argument, "max_iterations must be between 1 and 8");
    }
    if (allowed_kinds.empty()) throw Error(Errc::invalid_argument, "at least one artifact kind must be allowed");
    if (baseline_mode && !(allowed_kinds == KindSet::only(ArtifactKind::transcript))) {
        throw Error(Errc::invalid_argument, "baseline mode allows transcripts only");
    }
    fusion.check();
}

bool tool_available(Tool t, const AgentConfig& cfg) {
    switch (t) {
        case Tool::search_sessions:
        case Tool::list_sessions: return true;
        case Tool::get_transcript:
        case Tool::get_speaker_profile: return cfg.allowed_kinds.contains(ArtifactKind::transcript);
        case Tool::get_concept_map: return cfg.allowed_kinds.contains(ArtifactKind::concept_map);
        case Tool::get_assessment: return cfg.allowed_kinds.contains(ArtifactKind::assessment);
    }
    return false;
}

json tool_schemas(const AgentConfig& cfg) {
    json out = json::array();
    for (const auto& s : specs()) {
        if (!tool_available(s.tool, cfg)) continue;
        json props = json::object();
        json required = json::array();
        for (const auto& p : s.params) {
            props[p.name] = {{"type", p.type}, {"description", p.description}};
            required.push_back(p.name);
        }
        out.push_back({{"name", to_string(s.tool)},
                       {"description", s.description},
                       {"parameters",
                        {{"type", "object"},
                         {"properties", props},
                         {"required", required},
                         {"additionalProperties", false}}}});
    }
    return out;
}

ToolResult dispatch_tool(const ToolCall& call, const AgentConfig& cfg, const ToolContext& ctx) {
    const auto tool = parse_tool(call.tool);
    if (!tool) return failure(call.tool, "unknown tool \"" + call.tool + "\"");
    const auto name = std::string(to_string(*tool));
    if (!tool_available(*tool, cfg)) return failure(name, std::string(kExcludedNote));
    if (const auto problem = argument_problem(spec(*tool), call.arguments); !problem.empty()) {
        return failure(name, "invalid arguments: " + problem);
    }
    try {
        switch (*tool) {
            case Tool::search_sessions: return run_search(call.arguments, cfg, ctx);
            case Tool::list_sessions: return run_list(ctx);
            case Tool::get_transcript: return run_transcript(call.arguments["discussion_id"].get<std::string>(), ctx);
            case Tool::get_concept_map: {
                const auto did = call.arguments["discussion_id"].get<std::string>();
                if (!ctx.repo.discussion(did)) return failure(name, "unknown discussion " + did);
                const auto map = ctx.repo.concept_map(did);
                if (!map) return failure(name, std::string(kMissingNote));
                return success(*tool, json(*map), {{did, ArtifactKind::concept_map}});
            }
            case Tool::get_assessment: {
                const auto did = call.arguments["discussion_id"].get<std::string>();
                if (!ctx.repo.discussion(did)) return failure(name, "unknown discussion " + did);
                const auto a = ctx.repo.assessment(did);
                if (!a) return failure(name, std::string(kMissingNote));
                return success(*tool, json(*a), {{did, ArtifactKind::assessment}});
            }
            case Tool::get_speaker_profile: {
                const bool maps = cfg.allowed_kinds.contains(ArtifactKind::concept_map);
                const auto profile =
                    compute_speaker_profile(call.arguments["speaker_id"].get<std::string>(), ctx.repo, maps);
                std::vector<Citation> evidence;
                for (const auto& d : profile.participation) {
                    evidence.push_back({d.discussion_id, ArtifactKind::transcript});
                    if (maps && ctx.repo.concept_map(d.discussion_id)) {
                        evidence.push_back({d.discussion_id, ArtifactKind::concept_map});
                    }
                }
                return success(*tool, to_json(profile), std::move(evidence));
            }
        }
    } catch (const Error& e) {
        return failure(name, e.what());
    }
    return failure(name, "unhandled tool");
}

json to_json(const ToolCall& c) { return json{{"tool", c.tool}, {"arguments", c.arguments}}; }

json to_json(const Citation& c) { return json{{"discussion_id", c.discussion_id}, {"kind", to_string(c.kind)}}; }

json to_json(const ToolResult& r) {
    json evidence = json::array();
    for (const auto& c : r.evidence) evidence.push_back(to_json(c));
    return json{{"tool", r.tool},
                {"ok", r.ok},
                {"payload", r.payload},
                {"error_note", r.error_note ? json(*r.error_note) : json(nullptr)},
                {"evidence", evidence}};
}

}  // namespace collab::agent
