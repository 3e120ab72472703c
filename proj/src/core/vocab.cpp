#include "collab/core/vocab.hpp"

#include <string>

#include "collab/core/text.hpp"

namespace collab {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> parse_from(std::string_view s, const std::array<Enum, N>& all) {
    const std::string needle = text::to_lower(text::trim(s));
    for (Enum e : all) {
        if (to_string(e) == needle) return e;
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(NodeType t) {
    switch (t) {
        case NodeType::idea: return "idea";
        case NodeType::question: return "question";
        case NodeType::hypothesis: return "hypothesis";
        case NodeType::example: return "example";
        case NodeType::problem: return "problem";
        case NodeType::solution: return "solution";
        case NodeType::goal: return "goal";
        case NodeType::uncertainty: return "uncertainty";
        case NodeType::conclusion: return "conclusion";
        case NodeType::action: return "action";
    }
    return "";
}

std::string_view to_string(EdgeType t) {
    switch (t) {
        case EdgeType::supports: return "supports";
        case EdgeType::builds_on: return "builds on";
        case EdgeType::challenges: return "challenges";
        case EdgeType::exemplifies: return "exemplifies";
        case EdgeType::answers: return "answers";
        case EdgeType::similar_to: return "similar to";
        case EdgeType::leads_to: return "leads to";
        case EdgeType::contrasts: return "contrasts";
        case EdgeType::relates_to: return "relates to";
    }
    return "";
}

std::string_view to_string(Dimension d) {
    switch (d) {
        case Dimension::climate: return "climate";
        case Dimension::communication: return "communication";
        case Dimension::compatibility: return "compatibility";
        case Dimension::conflict: return "conflict";
        case Dimension::context: return "context";
        case Dimension::contribution: return "contribution";
        case Dimension::constructive: return "constructive";
    }
    return "";
}

std::string_view display_name(Dimension d) {
    switch (d) {
        case Dimension::climate: return "Climate";
        case Dimension::communication: return "Communication";
        case Dimension::compatibility: return "Compatibility";
        case Dimension::conflict: return "Conflict";
        case Dimension::context: return "Context";
        case Dimension::contribution: return "Contribution";
        case Dimension::constructive: return "Constructive";
    }
    return "";
}

std::string_view to_string(ArtifactKind k) {
    switch (k) {
        case ArtifactKind::transcript: return "transcript";
        case ArtifactKind::concept_map: return "concept_map";
        case ArtifactKind::assessment: return "assessment";
    }
    return "";
}

std::optional<NodeType> parse_node_type(std::string_view s) { return parse_from(s, kAllNodeTypes); }
std::optional<EdgeType> parse_edge_type(std::string_view s) { return parse_from(s, kAllEdgeTypes); }
std::optional<Dimension> parse_dimension(std::string_view s) { return parse_from(s, kAllDimensions); }
std::optional<ArtifactKind> parse_artifact_kind(std::string_view s) {
    return parse_from(s, kAllArtifactKinds);
}

std::string_view dimension_definition(Dimension d) {
    switch (d) {
        case Dimension::climate:
            return "the emotional and affective aspects of the collaboration";
        case Dimension::communication:
            return "the quantity and quality of information shared among group members";
        case Dimension::compatibility:
            return "how well group members' working and interaction styles complement each other";
        case Dimension::conflict:
            return "students' approaches to handling challenging or contentious situations that arise";
        case Dimension::context:
            return "the who, why, and where of the collaboration";
        case Dimension::contribution:
            return "what each individual brings to the group";
        case Dimension::constructive:
            return "the overall goals of the collaboration and the team's progress toward achieving them";
    }
    return "";
}

std::size_t KindSet::size() const {
    std::size_t n = 0;
    for (auto k : kAllArtifactKinds) n += contains(k) ? 1 : 0;
    return n;
}

std::vector<ArtifactKind> KindSet::members() const {
    std::vector<ArtifactKind> out;
    for (auto k : kAllArtifactKinds) {
        if (contains(k)) out.push_back(k);
    }
    return out;
}

}  // namespace collab
