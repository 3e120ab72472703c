#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace collab {

// Closed vocabularies. Parsing is case-insensitive and trims surrounding
// whitespace; nothing else (no synonyms, no underscores for spaces).

enum class NodeType : std::uint8_t {
    idea,
    question,
    hypothesis,
    example,
    problem,
    solution,
    goal,
    uncertainty,
    conclusion,
    action,
};

inline constexpr std::array<NodeType, 10> kAllNodeTypes = {
    NodeType::idea,        NodeType::question, NodeType::hypothesis, NodeType::example,
    NodeType::problem,     NodeType::solution, NodeType::goal,       NodeType::uncertainty,
    NodeType::conclusion,  NodeType::action,
};

enum class EdgeType : std::uint8_t {
    supports,
    builds_on,
    challenges,
    exemplifies,
    answers,
    similar_to,
    leads_to,
    contrasts,
    relates_to,
};

inline constexpr std::array<EdgeType, 9> kAllEdgeTypes = {
    EdgeType::supports,   EdgeType::builds_on, EdgeType::challenges,
    EdgeType::exemplifies, EdgeType::answers,  EdgeType::similar_to,
    EdgeType::leads_to,   EdgeType::contrasts, EdgeType::relates_to,
};

// Listed in canonical rendering order.
enum class Dimension : std::uint8_t {
    climate,
    communication,
    compatibility,
    conflict,
    context,
    contribution,
    constructive,
};

inline constexpr std::array<Dimension, 7> kAllDimensions = {
    Dimension::climate,  Dimension::communication, Dimension::compatibility,
    Dimension::conflict, Dimension::context,       Dimension::contribution,
    Dimension::constructive,
};

enum class ArtifactKind : std::uint8_t {
    transcript,
    concept_map,
    assessment,
};

inline constexpr std::array<ArtifactKind, 3> kAllArtifactKinds = {
    ArtifactKind::transcript, ArtifactKind::concept_map, ArtifactKind::assessment};

std::string_view to_string(NodeType t);
std::string_view to_string(EdgeType t);
std::string_view to_string(Dimension d);      // lowercase wire form, e.g. "climate"
std::string_view display_name(Dimension d);   // "Climate"
std::string_view to_string(ArtifactKind k);   // "concept_map"

std::optional<NodeType> parse_node_type(std::string_view s);
std::optional<EdgeType> parse_edge_type(std::string_view s);
std::optional<Dimension> parse_dimension(std::string_view s);
std::optional<ArtifactKind> parse_artifact_kind(std::string_view s);

// Rubric definition handed to the assessment generator.
std::string_view dimension_definition(Dimension d);

// Non-empty-or-empty subset of ArtifactKind. Iteration is always in canonical order.
class KindSet {
public:
    constexpr KindSet() = default;

    static constexpr KindSet all() { return KindSet(0b111); }
    static constexpr KindSet none() { return KindSet(0); }
    static constexpr KindSet only(ArtifactKind k) { return KindSet(bit(k)); }

    constexpr bool contains(ArtifactKind k) const { return (bits_ & bit(k)) != 0; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr KindSet& insert(ArtifactKind k) {
        bits_ |= bit(k);
        return *this;
    }
    constexpr KindSet& erase(ArtifactKind k) {
        bits_ &= static_cast<std::uint8_t>(~bit(k));
        return *this;
    }
    std::size_t size() const;
    std::vector<ArtifactKind> members() const;

    constexpr bool operator==(const KindSet&) const = default;

private:
    constexpr explicit KindSet(std::uint8_t bits) : bits_(bits) {}
    static constexpr std::uint8_t bit(ArtifactKind k) {
        return static_cast<std::uint8_t>(1u << static_cast<unsigned>(k));
    }

    std::uint8_t bits_ = 0;
};

}  // namespace collab
