#include "collab/core/validation.hpp"

#include <cmath>
#include <set>
#include <unordered_set>

#include "collab/core/text.hpp"

namespace collab {

const ConceptNode* ConceptMap::find_node(std::string_view node_id) const {
    for (const auto& n : nodes) {
        if (n.node_id == node_id) return &n;
    }
    return nullptr;
}

const DimensionAssessment* SevenCAssessment::find(Dimension d) const {
    for (const auto& da : dimensions) {
        if (da.dimension == d) return &da;
    }
    return nullptr;
}

std::string_view to_string(ValidationCode code) {
    switch (code) {
        case ValidationCode::malformed: return "malformed";
        case ValidationCode::unknown_node_type: return "unknown-node-type";
        case ValidationCode::unknown_edge_type: return "unknown-edge-type";
        case ValidationCode::unknown_dimension: return "unknown-dimension";
        case ValidationCode::duplicate_node_id: return "duplicate-node-id";
        case ValidationCode::duplicate_edge_id: return "duplicate-edge-id";
        case ValidationCode::dangling_edge: return "dangling-edge";
        case ValidationCode::self_loop: return "self-loop";
        case ValidationCode::empty_label: return "empty-label";
        case ValidationCode::label_too_long: return "label-too-long";
        case ValidationCode::invalid_utterance_index: return "invalid-utterance-index";
        case ValidationCode::missing_dimension: return "missing-dimension";
        case ValidationCode::duplicate_dimension: return "duplicate-dimension";
        case ValidationCode::score_out_of_range: return "score-out-of-range";
        case ValidationCode::empty_analysis: return "empty-analysis";
        case ValidationCode::anchor_mismatch: return "anchor-mismatch";
        case ValidationCode::empty_transcript: return "empty-transcript";
        case ValidationCode::non_dense_index: return "non-dense-index";
        case ValidationCode::invalid_time_range: return "invalid-time-range";
        case ValidationCode::empty_text: return "empty-text";
        case ValidationCode::unknown_speaker: return "unknown-speaker";
    }
    return "unknown";
}

std::string describe(const ValidationError& e) {
    std::string out(to_string(e.code));
    if (!e.detail.empty()) {
        out += ": ";
        out += e.detail;
    }
    return out;
}

std::string describe(std::span<const ValidationError> errors) {
    std::string out;
    for (const auto& e : errors) {
        if (!out.empty()) out += "; ";
        out += describe(e);
    }
    return out;
}

std::vector<ValidationError> validate_concept_map(const ConceptMap& map) {
    std::vector<ValidationError> errors;
    std::unordered_set<std::string> node_ids;
    for (const auto& n : map.nodes) {
        if (!node_ids.insert(n.node_id).second) {
            errors.push_back({ValidationCode::duplicate_node_id, n.node_id});
        }
        if (text::trim(n.label).empty()) {
            errors.push_back({ValidationCode::empty_label, n.node_id});
        } else if (text::codepoint_length(n.label) > kMaxLabelLength) {
            errors.push_back({ValidationCode::label_too_long, n.node_id});
        }
    }
    std::unordered_set<std::string> edge_ids;
    for (const auto& e : map.edges) {
        if (!edge_ids.insert(e.edge_id).second) {
            errors.push_back({ValidationCode::duplicate_edge_id, e.edge_id});
        }
        if (e.source == e.target) {
            errors.push_back({ValidationCode::self_loop, e.edge_id});
        }
        for (const auto* end : {&e.source, &e.target}) {
            if (!node_ids.contains(*end)) {
                errors.push_back({ValidationCode::dangling_edge, e.edge_id + " -> " + *end});
            }
        }
    }
    return errors;
}

std::vector<ValidationError> validate_concept_map(const ConceptMap& map, const Transcript& transcript) {
    auto errors = validate_concept_map(map);
    const std::size_t count = transcript.utterances.size();
    for (const auto& n : map.nodes) {
        for (auto idx : n.source_utterance_indices) {
            if (idx >= count) {
                errors.push_back({ValidationCode::invalid_utterance_index,
                                  n.node_id + " references utterance " + std::to_string(idx)});
            }
        }
    }
    return errors;
}

std::vector<ValidationError> validate_assessment(const SevenCAssessment& a) {
    std::vector<ValidationError> errors;
    std::set<Dimension> seen;
    for (const auto& d : a.dimensions) {
        const std::string name(display_name(d.dimension));
        if (!seen.insert(d.dimension).second) {
            errors.push_back({ValidationCode::duplicate_dimension, name});
        }
        if (d.score < 0 || d.score > 100) {
            errors.push_back({ValidationCode::score_out_of_range,
                              name + " score " + std::to_string(d.score)});
        }
        if (text::trim(d.analysis).empty()) {
            errors.push_back({ValidationCode::empty_analysis, name});
        }
        if (!d.anchors.empty()) {
            if (d.anchors.size() != d.key_evidence.size()) {
                errors.push_back({ValidationCode::anchor_mismatch, name});
            } else {
                for (std::size_t i = 0; i < d.anchors.size(); ++i) {
                    const auto& anchor = d.anchors[i];
                    if (anchor.excerpt != d.key_evidence[i] ||
                        (anchor.utterance_index && anchor.match_score < kAnchorThreshold)) {
                        errors.push_back({ValidationCode::anchor_mismatch, name});
                        break;
                    }
                }
            }
        }
    }
    for (auto dim : kAllDimensions) {
        if (!seen.contains(dim)) {
            errors.push_back({ValidationCode::missing_dimension, std::string(display_name(dim))});
        }
    }
    return errors;
}

TranscriptCheck validate_transcript(const Transcript& t, std::span<const std::string> registered) {
    TranscriptCheck check;
    if (t.utterances.empty()) {
        check.errors.push_back({ValidationCode::empty_transcript, t.discussion_id});
        return check;
    }
    std::set<std::string> known(registered.begin(), registered.end());
    std::set<std::string> reported;
    for (std::size_t i = 0; i < t.utterances.size(); ++i) {
        const auto& u = t.utterances[i];
        if (u.index != i) {
            check.errors.push_back({ValidationCode::non_dense_index,
                                    "position " + std::to_string(i) + " has index " +
                                        std::to_string(u.index)});
        }
        if (u.start_ms < 0 || u.end_ms < u.start_ms) {
            check.errors.push_back({ValidationCode::invalid_time_range, "utterance " + std::to_string(i)});
        }
        if (text::trim(u.text).empty()) {
            check.errors.push_back({ValidationCode::empty_text, "utterance " + std::to_string(i)});
        }
        if (!known.empty() && !known.contains(u.speaker_id) && reported.insert(u.speaker_id).second) {
            check.warnings.push_back({ValidationCode::unknown_speaker, u.speaker_id});
        }
    }
    return check;
}

namespace {

using nlohmann::json;

bool get_string(const json& obj, const char* key, std::string& out, bool required,
                std::vector<ValidationError>& errors, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        if (required) errors.push_back({ValidationCode::malformed, where + " missing \"" + key + "\""});
        return false;
    }
    if (!it->is_string()) {
        errors.push_back({ValidationCode::malformed, where + " field \"" + key + "\" is not a string"});
        return false;
    }
    out = it->get<std::string>();
    return true;
}

template <typename T>
void get_array(const json& obj, const char* key, std::vector<T>& out,
               std::vector<ValidationError>& errors, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return;
    if (!it->is_array()) {
        errors.push_back({ValidationCode::malformed, where + " field \"" + key + "\" is not an array"});
        return;
    }
    for (const auto& item : *it) {
        if constexpr (std::is_same_v<T, std::string>) {
            if (!item.is_string()) {
                errors.push_back({ValidationCode::malformed, where + " \"" + key + "\" holds a non-string"});
                continue;
            }
            out.push_back(item.get<std::string>());
        } else {
            if (!item.is_number_integer() || item.get<long long>() < 0) {
                errors.push_back({ValidationCode::malformed,
                                  where + " \"" + key + "\" holds a non-index value"});
                continue;
            }
            out.push_back(static_cast<T>(item.get<long long>()));
        }
    }
}

void decode_metadata(const json& doc, std::string& discussion_id, Timestamp& generated_at,
                     std::string& provider_tag, std::vector<ValidationError>& errors) {
    get_string(doc, "discussion_id", discussion_id, false, errors, "document");
    get_string(doc, "provider_tag", provider_tag, false, errors, "document");
    std::string ts;
    if (get_string(doc, "generated_at", ts, false, errors, "document")) {
        try {
            generated_at = parse_iso8601(ts);
        } catch (const std::exception&) {
            errors.push_back({ValidationCode::malformed, "generated_at is not an ISO-8601 timestamp"});
        }
    }
}

}  // namespace

std::optional<ConceptMap> decode_concept_map(const json& doc, std::vector<ValidationError>& errors) {
    const std::size_t before = errors.size();
    if (!doc.is_object()) {
        errors.push_back({ValidationCode::malformed, "concept map is not a JSON object"});
        return std::nullopt;
    }
    ConceptMap map;
    decode_metadata(doc, map.discussion_id, map.generated_at, map.provider_tag, errors);

    const auto nodes = doc.find("nodes");
    if (nodes == doc.end() || !nodes->is_array()) {
        errors.push_back({ValidationCode::malformed, "\"nodes\" must be an array"});
    } else {
        for (std::size_t i = 0; i < nodes->size(); ++i) {
            const auto& item = (*nodes)[i];
            const std::string where = "node " + std::to_string(i);
            if (!item.is_object()) {
                errors.push_back({ValidationCode::malformed, where + " is not an object"});
                continue;
            }
            ConceptNode node;
            get_string(item, "node_id", node.node_id, true, errors, where);
            get_string(item, "label", node.label, true, errors, where);
            get_string(item, "description", node.description, false, errors, where);
            std::string type;
            if (get_string(item, "node_type", type, true, errors, where)) {
                if (auto parsed = parse_node_type(type)) {
                    node.node_type = *parsed;
                } else {
                    errors.push_back({ValidationCode::unknown_node_type, "\"" + type + "\" on " + where});
                }
            }
            get_array(item, "source_utterance_indices", node.source_utterance_indices, errors, where);
            get_array(item, "speaker_ids", node.speaker_ids, errors, where);
            node.label = text::truncate_with_ellipsis(node.label, kMaxLabelLength);
            map.nodes.push_back(std::move(node));
        }
    }

    const auto edges = doc.find("edges");
    if (edges == doc.end() || !edges->is_array()) {
        errors.push_back({ValidationCode::malformed, "\"edges\" must be an array"});
    } else {
        for (std::size_t i = 0; i < edges->size(); ++i) {
            const auto& item = (*edges)[i];
            const std::string where = "edge " + std::to_string(i);
            if (!item.is_object()) {
                errors.push_back({ValidationCode::malformed, where + " is not an object"});
                continue;
            }
            ConceptEdge edge;
            get_string(item, "edge_id", edge.edge_id, true, errors, where);
            get_string(item, "source", edge.source, true, errors, where);
            get_string(item, "target", edge.target, true, errors, where);
            get_string(item, "rationale", edge.rationale, false, errors, where);
            std::string type;
            if (get_string(item, "edge_type", type, true, errors, where)) {
                if (auto parsed = parse_edge_type(type)) {
                    edge.edge_type = *parsed;
                } else {
                    errors.push_back({ValidationCode::unknown_edge_type, "\"" + type + "\" on " + where});
                }
            }
            map.edges.push_back(std::move(edge));
        }
    }

    auto structural = validate_concept_map(map);
    errors.insert(errors.end(), structural.begin(), structural.end());
    if (errors.size() != before) return std::nullopt;
    return map;
}

std::optional<SevenCAssessment> decode_assessment(const json& doc, std::vector<ValidationError>& errors) {
    const std::size_t before = errors.size();
    if (!doc.is_object()) {
        errors.push_back({ValidationCode::malformed, "assessment is not a JSON object"});
        return std::nullopt;
    }
    SevenCAssessment a;
    decode_metadata(doc, a.discussion_id, a.generated_at, a.provider_tag, errors);

    const auto dims = doc.find("dimensions");
    if (dims == doc.end() || !dims->is_array()) {
        errors.push_back({ValidationCode::malformed, "\"dimensions\" must be an array"});
        return std::nullopt;
    }
    for (std::size_t i = 0; i < dims->size(); ++i) {
        const auto& item = (*dims)[i];
        const std::string where = "dimension entry " + std::to_string(i);
        if (!item.is_object()) {
            errors.push_back({ValidationCode::malformed, where + " is not an object"});
            continue;
        }
        DimensionAssessment d;
        std::string name;
        if (!get_string(item, "dimension", name, true, errors, where)) continue;
        if (auto parsed = parse_dimension(name)) {
            d.dimension = *parsed;
        } else {
            errors.push_back({ValidationCode::unknown_dimension, "\"" + name + "\""});
            continue;
        }
        const auto score = item.find("score");
        if (score == item.end() || !score->is_number()) {
            errors.push_back({ValidationCode::malformed, where + " missing numeric \"score\""});
        } else {
            const double raw = score->get<double>();
            if (!std::isfinite(raw) || raw < -1e9 || raw > 1e9) {
                errors.push_back({ValidationCode::score_out_of_range, std::string(display_name(d.dimension))});
            } else {
                d.score = static_cast<int>(std::floor(raw + 0.5));
            }
        }
        get_string(item, "analysis", d.analysis, true, errors, where);
        const auto ev = item.find("key_evidence");
        if (ev != item.end() && ev->is_string()) {
            // A single blank string is how some providers express "no evidence".
            if (!text::trim(ev->get<std::string>()).empty()) d.key_evidence.push_back(ev->get<std::string>());
        } else {
            std::vector<std::string> excerpts;
            get_array(item, "key_evidence", excerpts, errors, where);
            for (auto& e : excerpts) {
                if (!text::trim(e).empty()) d.key_evidence.push_back(std::move(e));
            }
        }
        const auto anchors = item.find("evidence_anchors");
        if (anchors != item.end() && anchors->is_array()) {
            for (const auto& an : *anchors) {
                EvidenceAnchor anchor;
                if (!an.is_object() || !get_string(an, "excerpt", anchor.excerpt, true, errors, where)) continue;
                const auto idx = an.find("utterance_index");
                if (idx != an.end() && idx->is_number_integer() && idx->get<long long>() >= 0) {
                    anchor.utterance_index = static_cast<std::size_t>(idx->get<long long>());
                }
                const auto ms = an.find("match_score");
                if (ms != an.end() && ms->is_number()) anchor.match_score = ms->get<double>();
                d.anchors.push_back(std::move(anchor));
            }
        }
        a.dimensions.push_back(std::move(d));
    }

    auto checked = validate_assessment(a);
    errors.insert(errors.end(), checked.begin(), checked.end());
    if (errors.size() != before) return std::nullopt;
    return a;
}

std::vector<ValidationError> check_concept_map_json(const json& doc, const Transcript& transcript) {
    std::vector<ValidationError> errors;
    if (auto map = decode_concept_map(doc, errors)) {
        return validate_concept_map(*map, transcript);
    }
    return errors;
}

std::vector<ValidationError> check_assessment_json(const json& doc) {
    std::vector<ValidationError> errors;
    decode_assessment(doc, errors);
    return errors;
}

}  // namespace collab
