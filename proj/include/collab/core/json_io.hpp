#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "collab/core/types.hpp"

// Canonical JSON shapes. Keys are emitted in sorted order (nlohmann's default
// object type), so dump() output is a pure function of the value.
//
// from_json overloads are strict: unknown enum strings and missing required
// fields throw collab::Error(parse_error).

namespace collab {

using json = nlohmann::json;

void to_json(json& j, const Timestamp& t);
void from_json(const json& j, Timestamp& t);

void to_json(json& j, const Session& s);
void from_json(const json& j, Session& s);
void to_json(json& j, const Discussion& d);
void from_json(const json& j, Discussion& d);
void to_json(json& j, const Utterance& u);
void from_json(const json& j, Utterance& u);
void to_json(json& j, const Transcript& t);
void from_json(const json& j, Transcript& t);
void to_json(json& j, const ConceptNode& n);
void to_json(json& j, const ConceptEdge& e);
void to_json(json& j, const ConceptMap& m);
void from_json(const json& j, ConceptMap& m);
void to_json(json& j, const EvidenceAnchor& a);
void from_json(const json& j, EvidenceAnchor& a);
void to_json(json& j, const DimensionAssessment& d);
void to_json(json& j, const SevenCAssessment& a);
void from_json(const json& j, SevenCAssessment& a);
void to_json(json& j, const PsycholinguisticSeries& s);
void from_json(const json& j, PsycholinguisticSeries& s);

// Compact canonical form used on the wire and for byte comparisons.
std::string canonical_dump(const json& j);
// Indented canonical form used for files on disk.
std::string pretty_dump(const json& j);

}  // namespace collab
