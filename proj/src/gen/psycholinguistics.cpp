#include "collab/gen/psycholinguistics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "collab/core/error.hpp"
#include "collab/core/text.hpp"

namespace collab::gen {

using nlohmann::json;

std::vector<std::string> DictionaryConfig::metric_names() const {
    std::vector<std::string> names;
    for (const auto& [name, stems] : categories) names.push_back(name);
    for (const auto& [name, c] : composites) names.push_back(name);
    return names;
}

DictionaryConfig parse_dictionary(const json& doc) {
    auto fail = [](const std::string& msg) { throw Error(Errc::config_error, "dictionary: " + msg); };
    if (!doc.is_object()) fail("document must be an object");
    DictionaryConfig dict;
    const auto cats = doc.find("categories");
    if (cats == doc.end() || !cats->is_object()) fail("\"categories\" object is required");
    for (const auto& [name, stems] : cats->items()) {
        if (name.empty()) fail("empty category name");
        if (!stems.is_array()) fail("category " + name + " must list stems");
        auto& out = dict.categories[name];
        for (const auto& s : stems) {
            if (!s.is_string()) fail("category " + name + " has a non-string stem");
            const auto stem = s.get<std::string>();
            if (stem.empty() || text::to_lower(stem) != stem || text::tokenize(stem).size() != 1 ||
                text::tokenize(stem).front() != stem) {
                fail("stem \"" + stem + "\" in " + name + " must be one lowercase alphanumeric word");
            }
            out.push_back(stem);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    const auto comps = doc.find("composites");
    if (comps != doc.end()) {
        if (!comps->is_object()) fail("\"composites\" must be an object");
        for (const auto& [name, spec] : comps->items()) {
            if (dict.categories.count(name)) fail("composite " + name + " clashes with a category");
            if (!spec.is_object()) fail("composite " + name + " must be an object");
            CompositeMetric c;
            const auto constant = spec.find("constant");
            if (constant != spec.end()) {
                if (!constant->is_number()) fail("composite " + name + " constant must be a number");
                c.constant = constant->get<double>();
            }
            const auto weights = spec.find("weights");
            if (weights == spec.end() || !weights->is_object()) fail("composite " + name + " needs weights");
            for (const auto& [cat, w] : weights->items()) {
                if (!dict.categories.count(cat)) fail("composite " + name + " uses unknown category " + cat);
                if (!w.is_number()) fail("weight " + name + "." + cat + " must be a number");
                c.weights[cat] = w.get<double>();
            }
            if (!std::isfinite(c.constant)) fail("composite " + name + " constant is not finite");
            for (const auto& [cat, w] : c.weights) {
                if (!std::isfinite(w)) fail("weight " + name + "." + cat + " is not finite");
            }
            dict.composites.emplace(name, std::move(c));
        }
    }
    return dict;
}

DictionaryConfig load_dictionary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::config_error, "cannot open dictionary " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto doc = json::parse(ss.str(), nullptr, false);
    if (doc.is_discarded()) throw Error(Errc::config_error, "dictionary " + path + " is not valid JSON");
    return parse_dictionary(doc);
}

json to_json(const DictionaryConfig& dict) {
    json cats = json::object();
    for (const auto& [name, stems] : dict.categories) cats[name] = stems;
    json comps = json::object();
    for (const auto& [name, c] : dict.composites) {
        json weights = json::object();
        for (const auto& [cat, w] : c.weights) weights[cat] = w;
        comps[name] = {{"constant", c.constant}, {"weights", weights}};
    }
    return json{{"categories", cats}, {"composites", comps}};
}

PsycholinguisticSeries compute_psycholinguistics(const Transcript& transcript, const DictionaryConfig& dict) {
    PsycholinguisticSeries series;
    series.discussion_id = transcript.discussion_id;
    series.metric_names = dict.metric_names();
    series.values.reserve(transcript.utterances.size());
    for (const auto& u : transcript.utterances) {
        const auto tokens = text::tokenize(u.text);
        std::vector<double> row;
        std::map<std::string, double> category_score;
        for (const auto& [name, stems] : dict.categories) {
            std::size_t hits = 0;
            for (const auto& tok : tokens) {
                const bool match = std::any_of(stems.begin(), stems.end(),
                                               [&](const std::string& s) { return tok.starts_with(s); });
                hits += match ? 1 : 0;
            }
            const double score =
                tokens.empty() ? 0.0 : 100.0 * static_cast<double>(hits) / static_cast<double>(tokens.size());
            category_score[name] = score;
            row.push_back(score);
        }
        for (const auto& [name, c] : dict.composites) {
            double v = c.constant;
            for (const auto& [cat, w] : c.weights) v += w * category_score[cat];
            row.push_back(std::clamp(v, 0.0, 100.0));
        }
        series.values.push_back(std::move(row));
    }
    return series;
}

}  // namespace collab::gen
