#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "collab/core/types.hpp"
#include "collab/core/validation.hpp"
#include "collab/gen/provider.hpp"

namespace collab::gen {

// Structured inputs travel inside the prompt as <tag>...</tag> blocks so that
// any provider (including the offline mock) can recover them unambiguously.
std::string tagged_block(std::string_view tag, std::string_view body);
std::optional<std::string> extract_block(std::string_view text, std::string_view tag);

// "[<index>] <speaker>: <text>" per line, newlines inside text collapsed.
std::string render_transcript_block(const Transcript& t);

struct TranscriptLine {
    std::size_t index = 0;
    std::string speaker_id;
    std::string text;
};
std::vector<TranscriptLine> parse_transcript_block(std::string_view block);

GenerationRequest concept_map_request(const Transcript& t);
GenerationRequest assessment_request(const Transcript& t);

// Same request with the rejection reasons appended, asking for a corrected document.
GenerationRequest repair_request(const GenerationRequest& original, std::span<const std::string> problems);

struct AnalystView {
    std::string analysis;
    std::vector<std::string> key_evidence;
};

// Analyst 1 / Analyst 2 are presented in the given order.
GenerationRequest judge_request(Dimension dimension, const AnalystView& first, const AnalystView& second);

}  // namespace collab::gen
