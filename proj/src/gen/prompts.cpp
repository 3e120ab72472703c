#include "collab/gen/prompts.hpp"

#include "collab/core/text.hpp"
#include "collab/gen/schemas.hpp"

namespace collab::gen {

namespace {

std::string collapse_newlines(std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return out;
}

std::string joined(auto const& items, std::string_view sep) {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) out += sep;
        out += to_string(item);
    }
    return out;
}

std::string evidence_lines(const std::vector<std::string>& evidence) {
    if (evidence.empty()) return "(blank)";
    std::string out;
    for (const auto& e : evidence) {
        if (!out.empty()) out += "\n";
        out += "- " + collapse_newlines(e);
    }
    return out;
}

}  // namespace

std::string tagged_block(std::string_view tag, std::string_view body) {
    std::string out = "<" + std::string(tag) + ">\n";
    out += body;
    if (!body.empty() && body.back() != '\n') out += "\n";
    out += "</" + std::string(tag) + ">";
    return out;
}

std::optional<std::string> extract_block(std::string_view text, std::string_view tag) {
    const std::string open = "<" + std::string(tag) + ">\n";
    const std::string close = "</" + std::string(tag) + ">";
    const auto start = text.find(open);
    if (start == std::string_view::npos) return std::nullopt;
    const auto body_start = start + open.size();
    const auto end = text.find(close, body_start);
    if (end == std::string_view::npos) return std::nullopt;
    auto body = text.substr(body_start, end - body_start);
    if (body.ends_with('\n')) body.remove_suffix(1);
    return std::string(body);
}

std::string render_transcript_block(const Transcript& t) {
    std::string out;
    for (const auto& u : t.utterances) {
        out += "[" + std::to_string(u.index) + "] " + u.speaker_id + ": " + collapse_newlines(u.text) + "\n";
    }
    return out;
}

std::vector<TranscriptLine> parse_transcript_block(std::string_view block) {
    std::vector<TranscriptLine> lines;
    std::size_t pos = 0;
    while (pos < block.size()) {
        auto end = block.find('\n', pos);
        if (end == std::string_view::npos) end = block.size();
        const auto line = block.substr(pos, end - pos);
        pos = end + 1;
        if (!line.starts_with('[')) continue;
        const auto close = line.find("] ");
        const auto colon = line.find(": ", close == std::string_view::npos ? 0 : close);
        if (close == std::string_view::npos || colon == std::string_view::npos) continue;
        TranscriptLine tl;
        try {
            tl.index = std::stoul(std::string(line.substr(1, close - 1)));
        } catch (const std::exception&) {
            continue;
        }
        tl.speaker_id = std::string(line.substr(close + 2, colon - close - 2));
        tl.text = std::string(line.substr(colon + 2));
        lines.push_back(std::move(tl));
    }
    return lines;
}

GenerationRequest concept_map_request(const Transcript& t) {
    GenerationRequest r;
    r.prompt_kind = PromptKind::concept_map;
    r.schema_id = std::string(schema::kConceptMap);
    r.max_output_tokens = 4096;
    r.system_text =
        "You build concept maps of small-group discussions for learning analysts. "
        "Nodes are concepts the group introduced; edges are relationships between them. "
        "Answer with a single JSON document and nothing else.";
    r.user_text =
        "Build a concept map of the discussion transcript below.\n\n"
        "Allowed concept types: " + joined(kAllNodeTypes, ", ") + ".\n"
        "Allowed relationship types: " + joined(kAllEdgeTypes, ", ") + ".\n"
        "Use these types exactly as written. Do not invent other types.\n"
        "Keep labels short (at most 120 characters). Cite the bracketed utterance indices a concept "
        "came from and the ids of the speakers who contributed it.\n\n"
        "Output schema:\n" + tagged_block("schema", schema::describe(schema::kConceptMap)) + "\n\n" +
        tagged_block("transcript", render_transcript_block(t));
    return r;
}

GenerationRequest assessment_request(const Transcript& t) {
    GenerationRequest r;
    r.prompt_kind = PromptKind::assessment;
    r.schema_id = std::string(schema::kAssessment);
    r.max_output_tokens = 4096;
    r.system_text =
        "You assess the collaboration quality of small-group discussions. "
        "Answer with a single JSON document and nothing else.";
    std::string definitions;
    for (auto d : kAllDimensions) {
        definitions += "- ";
        definitions += display_name(d);
        definitions += ": ";
        definitions += dimension_definition(d);
        definitions += "\n";
    }
    r.user_text =
        "Assess the discussion transcript below on each of the seven collaboration dimensions.\n\n" +
        tagged_block("dimensions", definitions) +
        "\n\nFor every dimension give (a) a score from 0 to 100, (b) a brief analysis describing the observed "
        "patterns that explain the score, and (c) key evidence excerpts copied verbatim from the transcript. "
        "Leave key_evidence empty when the transcript holds insufficient evidence for a dimension.\n\n"
        "Output schema:\n" + tagged_block("schema", schema::describe(schema::kAssessment)) + "\n\n" +
        tagged_block("transcript", render_transcript_block(t));
    return r;
}

GenerationRequest repair_request(const GenerationRequest& original, std::span<const std::string> problems) {
    GenerationRequest r = original;
    std::string list;
    for (const auto& p : problems) list += "- " + p + "\n";
    r.user_text += "\n\nYour previous answer was rejected for these reasons:\n" + tagged_block("problems", list) +
                   "\nReturn a corrected JSON document that follows the schema exactly.";
    return r;
}

GenerationRequest judge_request(Dimension dimension, const AnalystView& first, const AnalystView& second) {
    GenerationRequest r;
    r.prompt_kind = PromptKind::judge_pair;
    r.schema_id = std::string(schema::kJudgePair);
    r.max_output_tokens = 512;
    r.system_text =
        "You compare two independent analyses of the same group discussion. "
        "Answer with a single JSON document and nothing else.";
    r.user_text =
        "Dimension: " + std::string(display_name(dimension)) + " (" + std::string(dimension_definition(dimension)) +
        ")\n\n"
        "Rate the pair on two criteria, each on a 1-5 scale:\n"
        "1. behavioral_alignment: do both analyses identify the same collaborative behaviors and reach "
        "similar conclusions?\n"
        "2. evidence_correspondence: do both analyses draw on similar moments from the discussion?\n"
        "If both evidence fields are blank (insufficient evidence) and the analyses reach a similar "
        "conclusion, count the evidence as corresponding.\n\n" +
        tagged_block("analyst_1_analysis", collapse_newlines(first.analysis)) + "\n" +
        tagged_block("analyst_1_evidence", evidence_lines(first.key_evidence)) + "\n" +
        tagged_block("analyst_2_analysis", collapse_newlines(second.analysis)) + "\n" +
        tagged_block("analyst_2_evidence", evidence_lines(second.key_evidence)) + "\n\n" +
        "Output schema:\n" + tagged_block("schema", schema::describe(schema::kJudgePair));
    return r;
}

}  // namespace collab::gen
