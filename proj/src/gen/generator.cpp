#include "collab/gen/generator.hpp"

#include "collab/core/anchor.hpp"
#include "collab/core/validation.hpp"
#include "collab/gen/prompts.hpp"
#include "collab/gen/schemas.hpp"

namespace collab::gen {

namespace {

void require_valid_transcript(const Transcript& t) {
    const auto check = validate_transcript(t);
    if (!check.errors.empty()) {
        throw Error(Errc::invalid_argument, "invalid transcript " + t.discussion_id + ": " + describe(check.errors));
    }
}

struct Attempt {
    std::string raw;
    std::optional<json> doc;
    std::vector<std::string> problems;
};

// Runs the request and, if the output is unacceptable, one repair round-trip.
template <typename Check>
json obtain_valid(GenerationProvider& provider, const GenerationRequest& request, const RetryPolicy& retry,
                  Check&& check, std::string& provider_tag) {
    auto attempt = [&](const GenerationRequest& req) {
        const auto response = generate_with_retry(provider, req, retry);
        provider_tag = response.provider_tag.empty() ? provider.tag() : response.provider_tag;
        Attempt a;
        a.raw = response.raw_text;
        a.doc = structured_output(response);
        if (!a.doc) {
            a.problems.push_back("output is not valid JSON");
            return a;
        }
        a.problems = schema::shape_problems(request.schema_id, *a.doc);
        if (a.problems.empty()) {
            for (const auto& e : check(*a.doc)) a.problems.push_back(describe(e));
        }
        return a;
    };

    auto first = attempt(request);
    if (first.problems.empty()) return *first.doc;
    auto second = attempt(repair_request(request, first.problems));
    if (second.problems.empty()) return *second.doc;
    throw InvalidArtifact(std::string(to_string(request.prompt_kind)) + " output rejected after repair: " +
                              second.problems.front(),
                          {first.raw, second.raw}, second.problems);
}

}  // namespace

ConceptMap generate_concept_map(const Transcript& transcript, GenerationProvider& provider,
                                const GenerationOptions& options) {
    require_valid_transcript(transcript);
    std::string tag;
    const auto doc = obtain_valid(
        provider, concept_map_request(transcript), options.retry,
        [&](const json& d) { return check_concept_map_json(d, transcript); }, tag);
    std::vector<ValidationError> errors;
    auto map = decode_concept_map(doc, errors);
    if (!map) throw Error(Errc::invalid_artifact, "concept map failed to decode: " + describe(errors));
    map->discussion_id = transcript.discussion_id;
    map->generated_at = options.clock();
    map->provider_tag = tag;
    return std::move(*map);
}

SevenCAssessment generate_assessment(const Transcript& transcript, GenerationProvider& provider,
                                     const GenerationOptions& options) {
    require_valid_transcript(transcript);
    std::string tag;
    const auto doc = obtain_valid(provider, assessment_request(transcript), options.retry,
                                  [](const json& d) { return check_assessment_json(d); }, tag);
    std::vector<ValidationError> errors;
    auto a = decode_assessment(doc, errors);
    if (!a) throw Error(Errc::invalid_artifact, "assessment failed to decode: " + describe(errors));
    a->discussion_id = transcript.discussion_id;
    a->generated_at = options.clock();
    a->provider_tag = tag;
    for (auto& d : a->dimensions) {
        d.anchors.clear();
        for (const auto& excerpt : d.key_evidence) d.anchors.push_back(anchor_evidence(excerpt, transcript));
    }
    const auto final_errors = validate_assessment(*a);
    if (!final_errors.empty()) throw Error(Errc::invalid_artifact, describe(final_errors));
    return std::move(*a);
}

}  // namespace collab::gen
