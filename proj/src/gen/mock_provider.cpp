#include "collab/gen/mock_provider.hpp"

#include <cmath>
#include <set>

#include "collab/core/json_io.hpp"
#include "collab/core/text.hpp"
#include "collab/core/vocab.hpp"
#include "collab/gen/prompts.hpp"

namespace collab::gen {

namespace {

std::size_t slot(PromptKind kind) { return static_cast<std::size_t>(kind); }

std::vector<TranscriptLine> transcript_lines(const GenerationRequest& request) {
    const auto block = extract_block(request.user_text, "transcript");
    if (!block) throw Error(Errc::scripting_error, "mock: request has no <transcript> block");
    return parse_transcript_block(*block);
}

double jaccard(const std::string& a, const std::string& b) {
    const auto ta = text::tokenize(a);
    const auto tb = text::tokenize(b);
    const std::set<std::string> sa(ta.begin(), ta.end());
    const std::set<std::string> sb(tb.begin(), tb.end());
    if (sa.empty() && sb.empty()) return 1.0;
    std::size_t common = 0;
    for (const auto& w : sa) common += sb.count(w);
    return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
}

int similarity_score(const std::string& a, const std::string& b) {
    if (a == b) return 5;
    return 1 + static_cast<int>(std::floor(4.0 * jaccard(a, b) + 0.5));
}

}  // namespace

GenerationResponse json_response(const json& value, std::string tag) {
    GenerationResponse r;
    r.raw_text = canonical_dump(value);
    r.parsed = value;
    r.provider_tag = std::move(tag);
    return r;
}

MockProvider::MockProvider(std::string tag) : tag_(std::move(tag)) {}

void MockProvider::set_handler(PromptKind kind, ProviderHandler handler) {
    std::lock_guard lock(mutex_);
    handlers_[slot(kind)] = std::move(handler);
}

void MockProvider::clear_handler(PromptKind kind) { set_handler(kind, nullptr); }

std::size_t MockProvider::calls(PromptKind kind) const { return calls_[slot(kind)].load(); }

std::size_t MockProvider::total_calls() const {
    std::size_t n = 0;
    for (const auto& c : calls_) n += c.load();
    return n;
}

GenerationResponse MockProvider::generate(const GenerationRequest& request) {
    calls_[slot(request.prompt_kind)].fetch_add(1);
    ProviderHandler handler;
    {
        std::lock_guard lock(mutex_);
        handler = handlers_[slot(request.prompt_kind)];
    }
    if (handler) {
        auto response = handler(request);
        if (response.provider_tag.empty()) response.provider_tag = tag_;
        return response;
    }
    switch (request.prompt_kind) {
        case PromptKind::concept_map: return json_response(concept_map_output(request), tag_);
        case PromptKind::assessment: return json_response(assessment_output(request), tag_);
        case PromptKind::judge_pair: return json_response(judge_output(request), tag_);
        case PromptKind::agent_step:
        case PromptKind::synthesis: break;
    }
    throw Error(Errc::scripting_error,
                "mock: no script installed for " + std::string(to_string(request.prompt_kind)) + " requests");
}

json MockProvider::concept_map_output(const GenerationRequest& request) {
    json nodes = json::array();
    json edges = json::array();
    for (const auto& line : transcript_lines(request)) {
        for (const auto& sentence : text::split_sentences(line.text)) {
            const auto words = text::split_words(sentence);
            if (words.empty()) continue;
            std::string label;
            for (std::size_t i = 0; i < words.size() && i < 8; ++i) {
                if (i) label += ' ';
                label += words[i];
            }
            const std::string id = "n" + std::to_string(nodes.size() + 1);
            if (!nodes.empty()) {
                const std::string prev = "n" + std::to_string(nodes.size());
                edges.push_back({{"edge_id", "e" + std::to_string(edges.size() + 1)},
                                 {"source", prev},
                                 {"target", id},
                                 {"edge_type", to_string(EdgeType::relates_to)},
                                 {"rationale", "consecutive ideas"}});
            }
            nodes.push_back({{"node_id", id},
                             {"label", label},
                             {"node_type", to_string(NodeType::idea)},
                             {"description", sentence},
                             {"source_utterance_indices", json::array({line.index})},
                             {"speaker_ids", json::array({line.speaker_id})}});
        }
    }
    return json{{"nodes", nodes}, {"edges", edges}};
}

json MockProvider::assessment_output(const GenerationRequest& request) {
    const auto lines = transcript_lines(request);
    std::string joined;
    for (const auto& line : lines) {
        if (!joined.empty()) joined += "\n";
        joined += line.text;
    }
    json dims = json::array();
    for (auto d : kAllDimensions) {
        const std::string name(display_name(d));
        const int score = 40 + static_cast<int>(text::fnv1a64(joined + name) % 51);
        json evidence = json::array();
        if (!lines.empty()) evidence.push_back(lines.front().text);
        dims.push_back({{"dimension", to_string(d)},
                        {"score", score},
                        {"analysis", name + ": the group scored " + std::to_string(score) + " across " +
                                         std::to_string(lines.size()) + " utterances."},
                        {"key_evidence", evidence}});
    }
    return json{{"dimensions", dims}};
}

json MockProvider::judge_output(const GenerationRequest& request) {
    const auto field = [&](const char* tag) { return extract_block(request.user_text, tag).value_or(""); };
    const int behavioral = similarity_score(field("analyst_1_analysis"), field("analyst_2_analysis"));
    const int evidence = similarity_score(field("analyst_1_evidence"), field("analyst_2_evidence"));
    return json{{"behavioral_alignment", behavioral},
                {"evidence_correspondence", evidence},
                {"rationale", "token overlap"}};
}

}  // namespace collab::gen
