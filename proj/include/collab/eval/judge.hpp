#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "collab/core/types.hpp"
#include "collab/gen/provider.hpp"
#include "collab/index/embedding.hpp"

namespace collab::eval {

struct JudgeRun {
    bool swapped = false;  // analyst 1 in the prompt was assessment b
    int behavioral_alignment = 0;
    int evidence_correspondence = 0;
    bool reprompted = false;
};

struct JudgeScores {
    double behavioral_alignment = 0.0;  // mean over runs
    double evidence_correspondence = 0.0;
    std::vector<JudgeRun> runs;
};

// Order per run: engine() & 1 from mt19937_64(seed), one draw per run.
std::vector<bool> judge_presentation_order(int runs, std::uint64_t seed);

// Compares the two assessments' analysis and evidence for one dimension.
// A reply without two integer scores in 1..5 is re-prompted once with the
// problem listed; a second bad reply throws gen::InvalidArtifact. Transport
// failures are retried per `retry`, then Error(generation_failed).
// Throws Error(invalid_argument) when an assessment lacks the dimension or runs < 1.
JudgeScores judge_pair(const SevenCAssessment& a, const SevenCAssessment& b, Dimension dimension,
                       gen::GenerationProvider& provider, int runs = 3, std::uint64_t seed = 0,
                       const gen::RetryPolicy& retry = {});

// Cosine of the two texts' embeddings, in [-1, 1].
double cosine_text_similarity(const std::string& a, const std::string& b, index::EmbeddingProvider& provider);

}  // namespace collab::eval
