#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "collab/core/error.hpp"

namespace collab::gen {

using json = nlohmann::json;

enum class PromptKind { concept_map, assessment, judge_pair, agent_step, synthesis };

std::string_view to_string(PromptKind kind);
std::optional<PromptKind> parse_prompt_kind(std::string_view s);

struct GenerationRequest {
    PromptKind prompt_kind = PromptKind::concept_map;
    std::string system_text;
    std::string user_text;
    std::string schema_id;
    int max_output_tokens = 4096;
};

struct GenerationResponse {
    std::string raw_text;
    std::optional<json> parsed;
    std::string provider_tag;
    std::int64_t latency_ms = 0;
};

void to_json(json& j, const GenerationRequest& r);
void from_json(const json& j, GenerationRequest& r);
void to_json(json& j, const GenerationResponse& r);
void from_json(const json& j, GenerationResponse& r);

// Throws Error(invalid_argument) when the schema is unknown or user_text is empty.
void check_request(const GenerationRequest& r);

// Transport-level failure (connection refused, 5xx, timeout). Retried.
class ProviderError : public Error {
public:
    explicit ProviderError(const std::string& message) : Error(Errc::provider_failure, message) {}
};

// Implementations must tolerate concurrent generate() calls.
class GenerationProvider {
public:
    virtual ~GenerationProvider() = default;

    virtual GenerationResponse generate(const GenerationRequest& request) = 0;
    virtual std::string tag() const = 0;
};

struct RetryPolicy {
    int retries = 2;
    std::chrono::milliseconds base_delay{250};
};

// Calls the provider, retrying ProviderError with exponential backoff.
// After the last retry fails, throws Error(generation_failed).
GenerationResponse generate_with_retry(GenerationProvider& provider, const GenerationRequest& request,
                                       const RetryPolicy& policy);

// Structured payload of a response: `parsed` when present, otherwise the raw
// text parsed as JSON (a surrounding ```json fence is tolerated).
std::optional<json> structured_output(const GenerationResponse& response);

}  // namespace collab::gen
