#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "collab/core/types.hpp"

namespace collab {

enum class ValidationCode {
    malformed,
    unknown_node_type,
    unknown_edge_type,
    unknown_dimension,
    duplicate_node_id,
    duplicate_edge_id,
    dangling_edge,
    self_loop,
    empty_label,
    label_too_long,
    invalid_utterance_index,
    missing_dimension,
    duplicate_dimension,
    score_out_of_range,
    empty_analysis,
    anchor_mismatch,
    empty_transcript,
    non_dense_index,
    invalid_time_range,
    empty_text,
    unknown_speaker,
};

std::string_view to_string(ValidationCode code);

struct ValidationError {
    ValidationCode code;
    std::string detail;

    bool operator==(const ValidationError&) const = default;
};

// "missing-dimension: Conflict"
std::string describe(const ValidationError& e);
std::string describe(std::span<const ValidationError> errors);

// Structural checks only (ids, edges, label length).
std::vector<ValidationError> validate_concept_map(const ConceptMap& map);
// Structural checks plus source_utterance_indices resolved against the transcript.
std::vector<ValidationError> validate_concept_map(const ConceptMap& map, const Transcript& transcript);

std::vector<ValidationError> validate_assessment(const SevenCAssessment& a);

struct TranscriptCheck {
    std::vector<ValidationError> errors;
    std::vector<ValidationError> warnings;  // unknown speakers
};

// Speakers outside `registered` produce warnings; an empty registry disables that check.
TranscriptCheck validate_transcript(const Transcript& t,
                                    std::span<const std::string> registered = {});

// Decoding with the closed vocabularies enforced. Every problem found is appended
// to `errors`; the value is returned only when the document is fully valid.
std::optional<ConceptMap> decode_concept_map(const nlohmann::json& doc,
                                             std::vector<ValidationError>& errors);
std::optional<SevenCAssessment> decode_assessment(const nlohmann::json& doc,
                                                  std::vector<ValidationError>& errors);

// Decode + validate against the transcript in one pass; empty iff the document is acceptable.
std::vector<ValidationError> check_concept_map_json(const nlohmann::json& doc,
                                                    const Transcript& transcript);
std::vector<ValidationError> check_assessment_json(const nlohmann::json& doc);

}  // namespace collab
