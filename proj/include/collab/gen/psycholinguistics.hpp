#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "collab/core/types.hpp"

namespace collab::gen {

struct CompositeMetric {
    double constant = 0.0;
    std::map<std::string, double> weights;  // category name -> weight
};

// {"categories": {"certainty": ["sure", "certain"]},
//  "composites": {"confidence": {"constant": 30, "weights": {"certainty": 0.5}}}}
struct DictionaryConfig {
    std::map<std::string, std::vector<std::string>> categories;
    std::map<std::string, CompositeMetric> composites;

    // Categories first, then composites, each in name order.
    std::vector<std::string> metric_names() const;
};

// Throws Error(config_error) on malformed documents, non-finite weights, empty or
// non-lowercase stems, composites naming unknown categories, or name clashes.
DictionaryConfig parse_dictionary(const nlohmann::json& doc);
DictionaryConfig load_dictionary(const std::string& path);
nlohmann::json to_json(const DictionaryConfig& dict);

// Per utterance: category = 100 * tokens matching any stem by prefix / token count
// (0 without tokens); composite = clamp(constant + sum weight * category, 0, 100).
PsycholinguisticSeries compute_psycholinguistics(const Transcript& transcript, const DictionaryConfig& dict);

}  // namespace collab::gen
