#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace collab::gen::schema {

inline constexpr std::string_view kConceptMap = "concept_map.v1";
inline constexpr std::string_view kAssessment = "assessment.v1";
inline constexpr std::string_view kJudgePair = "judge_pair.v1";
inline constexpr std::string_view kAgentStep = "agent_step.v1";
inline constexpr std::string_view kSynthesis = "synthesis.v1";

bool is_registered(std::string_view schema_id);

// Schema text embedded in prompts so the model knows the expected shape.
std::string_view describe(std::string_view schema_id);

// Shape check only (required keys and their JSON types); vocabulary and
// referential checks happen when the value is decoded into domain types.
std::vector<std::string> shape_problems(std::string_view schema_id, const nlohmann::json& value);

}  // namespace collab::gen::schema
