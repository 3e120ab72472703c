#include "collab/gen/schemas.hpp"

namespace collab::gen::schema {

namespace {

using nlohmann::json;

constexpr std::string_view kConceptMapText = R"S({
  "nodes": [
    {
      "node_id": "string, unique within the map (e.g. n1)",
      "label": "string, at most 120 characters",
      "node_type": "one of the allowed concept types",
      "description": "string",
      "source_utterance_indices": ["integer utterance index from the transcript"],
      "speaker_ids": ["speaker id who contributed the concept"]
    }
  ],
  "edges": [
    {
      "edge_id": "string, unique within the map (e.g. e1)",
      "source": "node_id",
      "target": "node_id, different from source",
      "edge_type": "one of the allowed relationship types",
      "rationale": "string"
    }
  ]
})S";

constexpr std::string_view kAssessmentText = R"S({
  "dimensions": [
    {
      "dimension": "climate | communication | compatibility | conflict | context | contribution | constructive",
      "score": "integer 0-100",
      "analysis": "non-empty string explaining the score",
      "key_evidence": ["verbatim excerpt from the transcript; leave the list empty when evidence is insufficient"]
    }
  ]
})S";

constexpr std::string_view kJudgePairText = R"S({
  "behavioral_alignment": "integer 1-5",
  "evidence_correspondence": "integer 1-5",
  "rationale": "string"
})S";

constexpr std::string_view kAgentStepText = R"S(Either
{"action": "tools", "reasoning": "string", "calls": [{"tool": "tool name", "arguments": {}}]}
or
{"action": "finish", "reasoning": "string"})S";

constexpr std::string_view kSynthesisText = R"S({
  "answer": "string",
  "citations": [{"discussion_id": "string", "kind": "transcript | concept_map | assessment"}]
})S";

void need(const json& v, const char* key, json::value_t type, std::vector<std::string>& out,
          const std::string& where) {
    const auto it = v.find(key);
    if (it == v.end()) {
        out.push_back(where + "missing \"" + key + "\"");
        return;
    }
    const bool ok = (type == json::value_t::number_integer) ? it->is_number_integer()
                    : (type == json::value_t::number_float) ? it->is_number()
                                                            : it->type() == type;
    if (!ok) out.push_back(where + "\"" + key + "\" has the wrong type");
}

}  // namespace

bool is_registered(std::string_view id) {
    return id == kConceptMap || id == kAssessment || id == kJudgePair || id == kAgentStep || id == kSynthesis;
}

std::string_view describe(std::string_view id) {
    if (id == kConceptMap) return kConceptMapText;
    if (id == kAssessment) return kAssessmentText;
    if (id == kJudgePair) return kJudgePairText;
    if (id == kAgentStep) return kAgentStepText;
    if (id == kSynthesis) return kSynthesisText;
    return {};
}

std::vector<std::string> shape_problems(std::string_view id, const json& v) {
    std::vector<std::string> out;
    if (!v.is_object()) {
        out.push_back("output is not a JSON object");
        return out;
    }
    using T = json::value_t;
    if (id == kConceptMap) {
        need(v, "nodes", T::array, out, "");
        need(v, "edges", T::array, out, "");
    } else if (id == kAssessment) {
        need(v, "dimensions", T::array, out, "");
        if (out.empty()) {
            for (std::size_t i = 0; i < v["dimensions"].size(); ++i) {
                const auto& d = v["dimensions"][i];
                const std::string where = "dimensions[" + std::to_string(i) + "]: ";
                if (!d.is_object()) {
                    out.push_back(where + "not an object");
                    continue;
                }
                need(d, "dimension", T::string, out, where);
                need(d, "score", T::number_float, out, where);
                need(d, "analysis", T::string, out, where);
            }
        }
    } else if (id == kJudgePair) {
        need(v, "behavioral_alignment", T::number_float, out, "");
        need(v, "evidence_correspondence", T::number_float, out, "");
    } else if (id == kAgentStep) {
        need(v, "action", T::string, out, "");
        if (out.empty()) {
            const auto action = v["action"].get<std::string>();
            if (action == "tools") {
                need(v, "calls", T::array, out, "");
                if (out.empty()) {
                    for (const auto& c : v["calls"]) {
                        if (!c.is_object() || !c.contains("tool") || !c["tool"].is_string()) {
                            out.push_back("each call needs a string \"tool\"");
                        } else if (c.contains("arguments") && !c["arguments"].is_object()) {
                            out.push_back("call arguments must be an object");
                        }
                    }
                }
            } else if (action != "finish") {
                out.push_back("\"action\" must be \"tools\" or \"finish\"");
            }
        }
    } else if (id == kSynthesis) {
        need(v, "answer", T::string, out, "");
        if (v.contains("citations") && !v["citations"].is_array()) out.push_back("\"citations\" must be an array");
    } else {
        out.push_back("unregistered schema " + std::string(id));
    }
    return out;
}

}  // namespace collab::gen::schema
