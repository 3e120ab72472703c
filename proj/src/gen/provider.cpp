#include "collab/gen/provider.hpp"

#include <array>
#include <thread>

#include "collab/core/text.hpp"
#include "collab/gen/schemas.hpp"

namespace collab::gen {

namespace {

constexpr std::array<PromptKind, 5> kAllKinds = {PromptKind::concept_map, PromptKind::assessment,
                                                 PromptKind::judge_pair, PromptKind::agent_step,
                                                 PromptKind::synthesis};

}  // namespace

std::string_view to_string(PromptKind kind) {
    switch (kind) {
        case PromptKind::concept_map: return "concept_map";
        case PromptKind::assessment: return "assessment";
        case PromptKind::judge_pair: return "judge_pair";
        case PromptKind::agent_step: return "agent_step";
        case PromptKind::synthesis: return "synthesis";
    }
    return "";
}

std::optional<PromptKind> parse_prompt_kind(std::string_view s) {
    for (auto k : kAllKinds) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

void to_json(json& j, const GenerationRequest& r) {
    j = json{{"prompt_kind", to_string(r.prompt_kind)},
             {"system_text", r.system_text},
             {"user_text", r.user_text},
             {"schema_id", r.schema_id},
             {"max_output_tokens", r.max_output_tokens}};
}

void from_json(const json& j, GenerationRequest& r) {
    const auto kind = parse_prompt_kind(j.at("prompt_kind").get<std::string>());
    if (!kind) throw Error(Errc::parse_error, "unknown prompt_kind");
    r.prompt_kind = *kind;
    r.system_text = j.value("system_text", std::string{});
    r.user_text = j.at("user_text").get<std::string>();
    r.schema_id = j.at("schema_id").get<std::string>();
    r.max_output_tokens = j.value("max_output_tokens", 4096);
}

void to_json(json& j, const GenerationResponse& r) {
    j = json{{"raw_text", r.raw_text},
             {"parsed", r.parsed ? *r.parsed : json(nullptr)},
             {"provider_tag", r.provider_tag},
             {"latency_ms", r.latency_ms}};
}

void from_json(const json& j, GenerationResponse& r) {
    r.raw_text = j.value("raw_text", std::string{});
    const auto parsed = j.find("parsed");
    r.parsed = (parsed == j.end() || parsed->is_null()) ? std::nullopt : std::optional<json>(*parsed);
    r.provider_tag = j.value("provider_tag", std::string{});
    r.latency_ms = j.value("latency_ms", std::int64_t{0});
}

void check_request(const GenerationRequest& r) {
    if (!schema::is_registered(r.schema_id)) {
        throw Error(Errc::invalid_argument, "unregistered schema id: " + r.schema_id);
    }
    if (text::trim(r.user_text).empty()) throw Error(Errc::invalid_argument, "user_text is empty");
    if (r.max_output_tokens <= 0) throw Error(Errc::invalid_argument, "max_output_tokens must be positive");
}

GenerationResponse generate_with_retry(GenerationProvider& provider, const GenerationRequest& request,
                                       const RetryPolicy& policy) {
    check_request(request);
    auto delay = policy.base_delay;
    std::string last_error;
    for (int attempt = 0; attempt <= policy.retries; ++attempt) {
        try {
            return provider.generate(request);
        } catch (const ProviderError& e) {
            last_error = e.what();
        }
        if (attempt < policy.retries && delay.count() > 0) {
            std::this_thread::sleep_for(delay);
            delay *= 2;
        }
    }
    throw Error(Errc::generation_failed, "provider " + provider.tag() + " failed after " +
                                             std::to_string(policy.retries + 1) + " attempts: " + last_error);
}

std::optional<json> structured_output(const GenerationResponse& response) {
    if (response.parsed) return response.parsed;
    std::string_view body = text::trim(response.raw_text);
    if (body.starts_with("```")) {
        const auto first_newline = body.find('\n');
        const auto closing = body.rfind("```");
        if (first_newline != std::string_view::npos && closing > first_newline) {
            body = text::trim(body.substr(first_newline + 1, closing - first_newline - 1));
        }
    }
    auto parsed = json::parse(body, nullptr, false);
    if (parsed.is_discarded()) return std::nullopt;
    return parsed;
}

}  // namespace collab::gen
