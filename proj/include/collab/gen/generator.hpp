#pragma once

#include <string>
#include <vector>

#include "collab/core/time.hpp"
#include "collab/core/types.hpp"
#include "collab/gen/provider.hpp"

namespace collab::gen {

struct GenerationOptions {
    RetryPolicy retry;
    Clock clock = system_clock();
};

// Provider output that stayed invalid after the repair round-trip. Keeps every
// raw output (first attempt, then repair) and the final list of problems for audit.
class InvalidArtifact : public Error {
public:
    InvalidArtifact(const std::string& message, std::vector<std::string> raw_outputs,
                    std::vector<std::string> problems)
        : Error(Errc::invalid_artifact, message),
          raw_outputs_(std::move(raw_outputs)),
          problems_(std::move(problems)) {}

    const std::vector<std::string>& raw_outputs() const { return raw_outputs_; }
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> raw_outputs_;
    std::vector<std::string> problems_;
};

// Both generators:
//  - reject an invalid transcript with Error(invalid_argument);
//  - retry transport failures per options.retry, then throw Error(generation_failed);
//  - on schema or vocabulary violations re-prompt once with the problems listed,
//    then throw InvalidArtifact.
// The returned artifact always passes core validation.
ConceptMap generate_concept_map(const Transcript& transcript, GenerationProvider& provider,
                                const GenerationOptions& options = {});

// Every key_evidence excerpt is anchored against the transcript; unanchored
// excerpts are kept with an empty utterance index.
SevenCAssessment generate_assessment(const Transcript& transcript, GenerationProvider& provider,
                                     const GenerationOptions& options = {});

}  // namespace collab::gen
