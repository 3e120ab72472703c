#pragma once

#include <cstddef>
#include <string>

#include "collab/core/types.hpp"

namespace collab {

// Serialized artifacts are capped so a whole artifact fits one embedding window
// (8,192 tokens at ~4 chars per token, with headroom).
inline constexpr std::size_t kMaxArtifactTextChars = 30000;

// Line-oriented rendering used for embedding and display:
//
//   Concept map for discussion <id>
//   Nodes: <n>; Edges: <m>
//   [<type>] <label> — <description>
//   <source label> --<edge type>--> <target label>
//
// The " — <description>" suffix is omitted when the description is empty.
// Throws Error(invalid_artifact) when the map fails structural validation.
std::string serialize_concept_map_text(const ConceptMap& map);

// Per dimension in canonical order:
//
//   <Dimension> (<score>/100):
//   <analysis>
//   - <excerpt>            (one per evidence item, or "(no key evidence)")
//
std::string serialize_assessment_text(const SevenCAssessment& a);

// "Transcript for discussion <id>" then one "<speaker>: <text>" line per utterance.
std::string serialize_transcript_text(const Transcript& t);

}  // namespace collab
