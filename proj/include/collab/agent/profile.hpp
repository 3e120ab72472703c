#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "collab/agent/repository.hpp"

namespace collab::agent {

struct DiscussionShare {
    std::string discussion_id;
    std::string session_id;
    double share = 0.0;           // speaker tokens / all tokens in the discussion
    std::size_t speaker_tokens = 0;
    std::size_t total_tokens = 0;
};

struct SpeakerProfile {
    std::string speaker_id;
    std::vector<std::string> sessions;  // sessions with at least one utterance by the speaker
    std::vector<DiscussionShare> participation;
    // Nodes listing the speaker; absent when concept maps were not consulted.
    std::optional<std::size_t> concept_contributions;
    // Mean over the speaker's utterances in discussions that have metrics.
    std::map<std::string, double> psycholinguistic_means;
};

nlohmann::json to_json(const SpeakerProfile& p);

// Tokens are counted with the dictionary tokenizer. A discussion whose
// utterances carry no tokens at all falls back to utterance counts, so shares
// still sum to 1. Throws Error(not_found) when the speaker has no utterances.
SpeakerProfile compute_speaker_profile(const std::string& speaker_id, const Repository& repo,
                                       bool include_concept_maps = true);

}  // namespace collab::agent
