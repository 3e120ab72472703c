#include "collab/core/anchor.hpp"

#include "collab/core/error.hpp"
#include "collab/core/text.hpp"

namespace collab {

EvidenceAnchor anchor_evidence(std::string_view excerpt, const Transcript& transcript) {
    if (text::trim(excerpt).empty()) {
        throw Error(Errc::invalid_argument, "evidence excerpt is empty");
    }
    if (transcript.utterances.empty()) {
        throw Error(Errc::invalid_argument, "cannot anchor evidence in an empty transcript");
    }

    EvidenceAnchor anchor;
    anchor.excerpt = std::string(excerpt);
    const auto needle = text::normalize_for_match(excerpt);
    if (needle.empty()) return anchor;  // punctuation only: nothing to match on

    std::vector<std::u32string> normalized;
    normalized.reserve(transcript.utterances.size());
    for (const auto& u : transcript.utterances) {
        normalized.push_back(text::normalize_for_match(u.text));
    }
    for (std::size_t i = 0; i < normalized.size(); ++i) {
        if (normalized[i].find(needle) != std::u32string::npos) {
            anchor.utterance_index = transcript.utterances[i].index;
            anchor.match_score = 1.0;
            return anchor;
        }
    }

    double best = -1.0;
    std::size_t best_pos = 0;
    for (std::size_t i = 0; i < normalized.size(); ++i) {
        const double sim = text::levenshtein_similarity(needle, normalized[i]);
        if (sim > best) {
            best = sim;
            best_pos = i;
        }
    }
    anchor.match_score = best;
    if (best >= kAnchorThreshold) anchor.utterance_index = transcript.utterances[best_pos].index;
    return anchor;
}

}  // namespace collab
