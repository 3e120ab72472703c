#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "collab/agent/repository.hpp"
#include "collab/core/vocab.hpp"
#include "collab/index/retrieval.hpp"

namespace collab::agent {

using json = nlohmann::json;

enum class Tool { search_sessions, list_sessions, get_transcript, get_concept_map, get_assessment, get_speaker_profile };

inline constexpr std::array<Tool, 6> kAllTools = {Tool::search_sessions, Tool::list_sessions,
                                                  Tool::get_transcript,  Tool::get_concept_map,
                                                  Tool::get_assessment,  Tool::get_speaker_profile};

std::string_view to_string(Tool t);
std::optional<Tool> parse_tool(std::string_view s);

inline constexpr std::string_view kExcludedNote = "artifact kind excluded by configuration";
inline constexpr std::string_view kMissingNote = "artifact missing";

struct AgentConfig {
    int max_iterations = 8;
    KindSet allowed_kinds = KindSet::all();
    bool baseline_mode = false;
    index::FusionConfig fusion;
    std::size_t result_char_budget = 8000;

    // Transcript-only configuration used as the comparison baseline.
    static AgentConfig baseline();

    // Throws Error(invalid_argument) unless 1 <= max_iterations <= 8, allowed_kinds is
    // non-empty, and baseline_mode implies allowed_kinds == {transcript}.
    void check() const;
};

// Whether the configuration lets the tool touch what it needs.
bool tool_available(Tool t, const AgentConfig& cfg);

// Tool descriptions with JSON-schema parameters, limited to the available tools.
json tool_schemas(const AgentConfig& cfg);

struct ToolCall {
    std::string tool;  // free text: the provider may name tools that do not exist
    json arguments = json::object();

    bool operator==(const ToolCall&) const = default;
};

struct Citation {
    std::string discussion_id;
    ArtifactKind kind = ArtifactKind::transcript;

    auto operator<=>(const Citation&) const = default;
};

struct ToolResult {
    std::string tool;
    bool ok = false;
    json payload;                           // null when !ok
    std::optional<std::string> error_note;  // present iff !ok
    std::vector<Citation> evidence;         // artifacts this result exposed, sorted, unique

    bool operator==(const ToolResult&) const = default;
};

struct ToolContext {
    const Repository& repo;
    const index::Retriever& retriever;
};

// Never throws for bad input; every failure becomes ok=false with a note.
ToolResult dispatch_tool(const ToolCall& call, const AgentConfig& cfg, const ToolContext& ctx);

json to_json(const ToolCall& c);
json to_json(const Citation& c);
json to_json(const ToolResult& r);

}  // namespace collab::agent
