#include "collab/core/serialize.hpp"

#include <string_view>

#include "collab/core/error.hpp"
#include "collab/core/validation.hpp"

namespace collab {

namespace {

// Keeps the rendering line-oriented even when provider text contains newlines.
std::string one_line(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool space = false;
    for (char c : s) {
        if (c == '\n' || c == '\r' || c == '\t') {
            space = true;
            continue;
        }
        if (space && !out.empty()) out.push_back(' ');
        space = false;
        out.push_back(c);
    }
    return out;
}

std::string bounded(std::string text) {
    if (text.size() <= kMaxArtifactTextChars) return text;
    static constexpr std::string_view marker = "[truncated]\n";
    std::size_t cut = text.rfind('\n', kMaxArtifactTextChars - marker.size() - 1);
    cut = (cut == std::string::npos) ? 0 : cut + 1;
    text.resize(cut);
    text += marker;
    return text;
}

}  // namespace

std::string serialize_concept_map_text(const ConceptMap& map) {
    if (auto errors = validate_concept_map(map); !errors.empty()) {
        throw Error(Errc::invalid_artifact, "cannot serialize concept map: " + describe(errors));
    }
    std::string out = "Concept map for discussion " + map.discussion_id + "\n";
    out += "Nodes: " + std::to_string(map.nodes.size()) + "; Edges: " + std::to_string(map.edges.size()) + "\n";
    for (const auto& n : map.nodes) {
        out += "[";
        out += to_string(n.node_type);
        out += "] ";
        out += one_line(n.label);
        if (!n.description.empty()) {
            out += " — ";
            out += one_line(n.description);
        }
        out += "\n";
    }
    for (const auto& e : map.edges) {
        out += one_line(map.find_node(e.source)->label);
        out += " --";
        out += to_string(e.edge_type);
        out += "--> ";
        out += one_line(map.find_node(e.target)->label);
        out += "\n";
    }
    return bounded(std::move(out));
}

std::string serialize_assessment_text(const SevenCAssessment& a) {
    if (auto errors = validate_assessment(a); !errors.empty()) {
        throw Error(Errc::invalid_artifact, "cannot serialize assessment: " + describe(errors));
    }
    std::string out = "Collaboration assessment for discussion " + a.discussion_id + "\n";
    for (auto dim : kAllDimensions) {
        const auto* d = a.find(dim);
        out += display_name(dim);
        out += " (" + std::to_string(d->score) + "/100):\n";
        out += one_line(d->analysis) + "\n";
        if (d->key_evidence.empty()) {
            out += "(no key evidence)\n";
        }
        for (const auto& excerpt : d->key_evidence) {
            out += "- " + one_line(excerpt) + "\n";
        }
    }
    return bounded(std::move(out));
}

std::string serialize_transcript_text(const Transcript& t) {
    // No length cap here: an over-long transcript must fail the embedding window check.
    std::string out = "Transcript for discussion " + t.discussion_id + "\n";
    for (const auto& u : t.utterances) {
        out += u.speaker_id + ": " + one_line(u.text) + "\n";
    }
    return out;
}

}  // namespace collab
