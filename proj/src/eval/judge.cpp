#include "collab/eval/judge.hpp"

#include <cmath>
#include <random>

#include "collab/gen/generator.hpp"
#include "collab/gen/prompts.hpp"
#include "collab/gen/schemas.hpp"

namespace collab::eval {

namespace {

std::vector<std::string> score_problems(const std::optional<nlohmann::json>& v) {
    if (!v) return {"output is not a JSON document"};
    auto problems = gen::schema::shape_problems(gen::schema::kJudgePair, *v);
    if (!problems.empty()) return problems;
    for (const char* key : {"behavioral_alignment", "evidence_correspondence"}) {
        const double s = (*v)[key].get<double>();
        if (s != std::floor(s) || s < 1 || s > 5) {
            problems.push_back(std::string("\"") + key + "\" must be an integer from 1 to 5");
        }
    }
    return problems;
}

}  // namespace

std::vector<bool> judge_presentation_order(int runs, std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    std::vector<bool> out;
    for (int i = 0; i < runs; ++i) out.push_back((engine() & 1u) != 0);
    return out;
}

JudgeScores judge_pair(const SevenCAssessment& a, const SevenCAssessment& b, Dimension dimension,
                       gen::GenerationProvider& provider, int runs, std::uint64_t seed, const gen::RetryPolicy& retry) {
    if (runs < 1) throw Error(Errc::invalid_argument, "judge: runs must be at least 1");
    const auto* da = a.find(dimension);
    const auto* db = b.find(dimension);
    if (!da || !db) {
        throw Error(Errc::invalid_argument,
                    "judge: both assessments must contain " + std::string(display_name(dimension)));
    }
    const gen::AnalystView va{da->analysis, da->key_evidence};
    const gen::AnalystView vb{db->analysis, db->key_evidence};

    JudgeScores scores;
    for (const bool swapped : judge_presentation_order(runs, seed)) {
        const auto request = swapped ? gen::judge_request(dimension, vb, va) : gen::judge_request(dimension, va, vb);
        JudgeRun run;
        run.swapped = swapped;
        auto response = gen::generate_with_retry(provider, request, retry);
        auto parsed = gen::structured_output(response);
        auto problems = score_problems(parsed);
        if (!problems.empty()) {
            run.reprompted = true;
            const auto first_raw = response.raw_text;
            response = gen::generate_with_retry(provider, gen::repair_request(request, problems), retry);
            parsed = gen::structured_output(response);
            problems = score_problems(parsed);
            if (!problems.empty()) {
                throw gen::InvalidArtifact("judge: scores out of range after re-prompt", {first_raw, response.raw_text},
                                           problems);
            }
        }
        run.behavioral_alignment = static_cast<int>((*parsed)["behavioral_alignment"].get<double>());
        run.evidence_correspondence = static_cast<int>((*parsed)["evidence_correspondence"].get<double>());
        scores.behavioral_alignment += run.behavioral_alignment;
        scores.evidence_correspondence += run.evidence_correspondence;
        scores.runs.push_back(run);
    }
    scores.behavioral_alignment /= runs;
    scores.evidence_correspondence /= runs;
    return scores;
}

double cosine_text_similarity(const std::string& a, const std::string& b, index::EmbeddingProvider& provider) {
    return index::cosine(index::embed(a, provider), index::embed(b, provider));
}

}  // namespace collab::eval
