#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "collab/core/time.hpp"
#include "collab/core/vocab.hpp"

namespace collab {

inline constexpr std::size_t kMaxLabelLength = 120;
inline constexpr double kAnchorThreshold = 0.8;

struct Session {
    std::string session_id;
    std::string title;
    Timestamp started_at;
    std::vector<std::string> discussion_ids;
    std::map<std::string, std::string> metadata;

    bool operator==(const Session&) const = default;
};

struct Discussion {
    std::string discussion_id;
    std::string session_id;
    std::string group_label;
    std::int64_t duration_ms = 0;

    bool operator==(const Discussion&) const = default;
};

struct Utterance {
    std::size_t index = 0;
    std::string speaker_id;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
    std::string text;

    bool operator==(const Utterance&) const = default;
};

struct Transcript {
    std::string discussion_id;
    std::vector<Utterance> utterances;

    bool operator==(const Transcript&) const = default;
};

struct ConceptNode {
    std::string node_id;
    std::string label;
    NodeType node_type = NodeType::idea;
    std::string description;
    std::vector<std::size_t> source_utterance_indices;
    std::vector<std::string> speaker_ids;

    bool operator==(const ConceptNode&) const = default;
};

struct ConceptEdge {
    std::string edge_id;
    std::string source;
    std::string target;
    EdgeType edge_type = EdgeType::relates_to;
    std::string rationale;

    bool operator==(const ConceptEdge&) const = default;
};

struct ConceptMap {
    std::string discussion_id;
    std::vector<ConceptNode> nodes;
    std::vector<ConceptEdge> edges;
    Timestamp generated_at;
    std::string provider_tag;

    const ConceptNode* find_node(std::string_view node_id) const;

    bool operator==(const ConceptMap&) const = default;
};

struct EvidenceAnchor {
    std::string excerpt;
    std::optional<std::size_t> utterance_index;
    double match_score = 0.0;

    bool operator==(const EvidenceAnchor&) const = default;
};

struct DimensionAssessment {
    Dimension dimension = Dimension::climate;
    int score = 0;
    std::string analysis;
    // Empty means the rater found insufficient evidence for this dimension.
    std::vector<std::string> key_evidence;
    // Parallel to key_evidence once anchoring has run; empty before that.
    std::vector<EvidenceAnchor> anchors;

    bool operator==(const DimensionAssessment&) const = default;
};

struct SevenCAssessment {
    std::string discussion_id;
    std::vector<DimensionAssessment> dimensions;
    Timestamp generated_at;
    std::string provider_tag;

    const DimensionAssessment* find(Dimension d) const;

    bool operator==(const SevenCAssessment&) const = default;
};

struct PsycholinguisticSeries {
    std::string discussion_id;
    std::vector<std::string> metric_names;
    // One row per utterance, one column per metric.
    std::vector<std::vector<double>> values;

    bool operator==(const PsycholinguisticSeries&) const = default;
};

}  // namespace collab
