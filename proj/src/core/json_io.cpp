#include "collab/core/json_io.hpp"

#include "collab/core/error.hpp"
#include "collab/core/validation.hpp"

namespace collab {

namespace {

const json& require(const json& j, const char* key) {
    const auto it = j.find(key);
    if (!j.is_object() || it == j.end()) {
        throw Error(Errc::parse_error, std::string("missing field \"") + key + "\"");
    }
    return *it;
}

template <typename T>
T require_as(const json& j, const char* key) {
    try {
        return require(j, key).get<T>();
    } catch (const json::exception& e) {
        throw Error(Errc::parse_error, std::string("field \"") + key + "\": " + e.what());
    }
}

}  // namespace

void to_json(json& j, const Timestamp& t) { j = format_iso8601(t); }
void from_json(const json& j, Timestamp& t) {
    if (!j.is_string()) throw Error(Errc::parse_error, "timestamp must be a string");
    t = parse_iso8601(j.get<std::string>());
}

void to_json(json& j, const Session& s) {
    j = json{{"session_id", s.session_id},
             {"title", s.title},
             {"started_at", s.started_at},
             {"discussion_ids", s.discussion_ids},
             {"metadata", s.metadata}};
}

void from_json(const json& j, Session& s) {
    s.session_id = require_as<std::string>(j, "session_id");
    s.title = j.value("title", std::string{});
    s.started_at = require_as<Timestamp>(j, "started_at");
    s.discussion_ids = j.value("discussion_ids", std::vector<std::string>{});
    s.metadata = j.value("metadata", std::map<std::string, std::string>{});
}

void to_json(json& j, const Discussion& d) {
    j = json{{"discussion_id", d.discussion_id},
             {"session_id", d.session_id},
             {"group_label", d.group_label},
             {"duration_ms", d.duration_ms}};
}

void from_json(const json& j, Discussion& d) {
    d.discussion_id = require_as<std::string>(j, "discussion_id");
    d.session_id = require_as<std::string>(j, "session_id");
    d.group_label = j.value("group_label", std::string{});
    d.duration_ms = j.value("duration_ms", std::int64_t{0});
}

void to_json(json& j, const Utterance& u) {
    j = json{{"index", u.index},
             {"speaker_id", u.speaker_id},
             {"start_ms", u.start_ms},
             {"end_ms", u.end_ms},
             {"text", u.text}};
}

void from_json(const json& j, Utterance& u) {
    u.index = require_as<std::size_t>(j, "index");
    u.speaker_id = require_as<std::string>(j, "speaker_id");
    u.start_ms = require_as<std::int64_t>(j, "start_ms");
    u.end_ms = require_as<std::int64_t>(j, "end_ms");
    u.text = require_as<std::string>(j, "text");
}

void to_json(json& j, const Transcript& t) {
    j = json{{"discussion_id", t.discussion_id}, {"utterances", t.utterances}};
}

void from_json(const json& j, Transcript& t) {
    t.discussion_id = require_as<std::string>(j, "discussion_id");
    t.utterances = require_as<std::vector<Utterance>>(j, "utterances");
}

void to_json(json& j, const ConceptNode& n) {
    j = json{{"node_id", n.node_id},
             {"label", n.label},
             {"node_type", to_string(n.node_type)},
             {"description", n.description},
             {"source_utterance_indices", n.source_utterance_indices},
             {"speaker_ids", n.speaker_ids}};
}

void to_json(json& j, const ConceptEdge& e) {
    j = json{{"edge_id", e.edge_id},
             {"source", e.source},
             {"target", e.target},
             {"edge_type", to_string(e.edge_type)},
             {"rationale", e.rationale}};
}

void to_json(json& j, const ConceptMap& m) {
    j = json{{"discussion_id", m.discussion_id},
             {"nodes", m.nodes},
             {"edges", m.edges},
             {"generated_at", m.generated_at},
             {"provider_tag", m.provider_tag}};
}

void from_json(const json& j, ConceptMap& m) {
    std::vector<ValidationError> errors;
    auto decoded = decode_concept_map(j, errors);
    if (!decoded) throw Error(Errc::parse_error, "invalid concept map: " + describe(errors));
    m = std::move(*decoded);
}

void to_json(json& j, const EvidenceAnchor& a) {
    j = json{{"excerpt", a.excerpt},
             {"utterance_index", a.utterance_index ? json(*a.utterance_index) : json(nullptr)},
             {"match_score", a.match_score}};
}

void from_json(const json& j, EvidenceAnchor& a) {
    a.excerpt = require_as<std::string>(j, "excerpt");
    const auto& idx = require(j, "utterance_index");
    a.utterance_index = idx.is_null() ? std::nullopt : std::optional<std::size_t>(idx.get<std::size_t>());
    a.match_score = require_as<double>(j, "match_score");
}

void to_json(json& j, const DimensionAssessment& d) {
    j = json{{"dimension", to_string(d.dimension)},
             {"score", d.score},
             {"analysis", d.analysis},
             {"key_evidence", d.key_evidence},
             {"evidence_anchors", d.anchors}};
}

void to_json(json& j, const SevenCAssessment& a) {
    j = json{{"discussion_id", a.discussion_id},
             {"dimensions", a.dimensions},
             {"generated_at", a.generated_at},
             {"provider_tag", a.provider_tag}};
}

void from_json(const json& j, SevenCAssessment& a) {
    std::vector<ValidationError> errors;
    auto decoded = decode_assessment(j, errors);
    if (!decoded) throw Error(Errc::parse_error, "invalid assessment: " + describe(errors));
    a = std::move(*decoded);
}

void to_json(json& j, const PsycholinguisticSeries& s) {
    j = json{{"discussion_id", s.discussion_id}, {"metric_names", s.metric_names}, {"values", s.values}};
}

void from_json(const json& j, PsycholinguisticSeries& s) {
    s.discussion_id = require_as<std::string>(j, "discussion_id");
    s.metric_names = require_as<std::vector<std::string>>(j, "metric_names");
    s.values = require_as<std::vector<std::vector<double>>>(j, "values");
    for (const auto& row : s.values) {
        if (row.size() != s.metric_names.size()) {
            throw Error(Errc::parse_error, "metric row width does not match metric_names");
        }
    }
}

std::string canonical_dump(const json& j) {
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string pretty_dump(const json& j) {
    return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

}  // namespace collab
