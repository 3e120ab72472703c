#pragma once

#include <string_view>

#include "collab/core/types.hpp"

namespace collab {

// Resolves an evidence excerpt to the utterance it most likely came from.
//
// Containment of the normalized excerpt in a normalized utterance wins with
// score 1.0 (lowest index on ties). Otherwise the utterance with the highest
// normalized Levenshtein similarity is reported, and the index is left empty
// when that similarity is below kAnchorThreshold.
//
// Throws Error(invalid_argument) for an empty excerpt or a transcript without utterances.
EvidenceAnchor anchor_evidence(std::string_view excerpt, const Transcript& transcript);

}  // namespace collab
