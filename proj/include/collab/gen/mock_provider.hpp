#pragma once

#include <array>
#include <atomic>
#include <functional>
#include <mutex>
#include <optional>
#include <string>

#include "collab/gen/provider.hpp"

namespace collab::gen {

using ProviderHandler = std::function<GenerationResponse(const GenerationRequest&)>;

// Offline provider with fixed, documented behaviour:
//
//  concept_map  one "idea" node per sentence of the <transcript> block (sentences
//               split on . ? !), label = first 8 words, consecutive nodes chained
//               with "relates to" edges.
//  assessment   score(dim) = 40 + fnv1a64(utterance texts joined by "\n" + dimension
//               display name) mod 51; templated analysis; evidence = first utterance.
//  judge_pair   symmetric in the two analysts: 5 for identical fields, otherwise
//               1 + round(4 * token Jaccard).
//  agent_step,
//  synthesis    answered only by an installed handler; Error(scripting_error) otherwise.
//
// A handler installed for any kind overrides the built-in rule (used for fault injection).
class MockProvider : public GenerationProvider {
public:
    explicit MockProvider(std::string tag = "mock");

    GenerationResponse generate(const GenerationRequest& request) override;
    std::string tag() const override { return tag_; }

    void set_handler(PromptKind kind, ProviderHandler handler);
    void clear_handler(PromptKind kind);

    std::size_t calls(PromptKind kind) const;
    std::size_t total_calls() const;

    // The built-in rules, callable without going through a handler.
    static json concept_map_output(const GenerationRequest& request);
    static json assessment_output(const GenerationRequest& request);
    static json judge_output(const GenerationRequest& request);

private:
    std::string tag_;
    mutable std::mutex mutex_;
    std::array<ProviderHandler, 5> handlers_;
    std::array<std::atomic<std::size_t>, 5> calls_{};
};

// Wraps a value as a response from `tag`, filling both raw_text and parsed.
GenerationResponse json_response(const json& value, std::string tag = "mock");

}  // namespace collab::gen
