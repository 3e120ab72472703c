#include "collab/eval/retrieval_eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "collab/core/error.hpp"

namespace collab::eval {

using nlohmann::json;

namespace {

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

std::string lpad(std::string s, std::size_t width) {
    if (s.size() < width) s.insert(0, width - s.size(), ' ');
    return s;
}

}  // namespace

std::string_view to_string(QueryCategory c) { return c == QueryCategory::direct ? "direct" : "analytical"; }

std::optional<QueryCategory> parse_query_category(std::string_view s) {
    if (s == "direct") return QueryCategory::direct;
    if (s == "analytical") return QueryCategory::analytical;
    return std::nullopt;
}

std::vector<RetrievalEvalCase> parse_eval_cases(const json& doc) {
    if (!doc.is_array()) throw Error(Errc::parse_error, "eval cases: expected a JSON array");
    std::vector<RetrievalEvalCase> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& c = doc[i];
        const std::string where = "eval case " + std::to_string(i + 1) + ": ";
        if (!c.is_object()) throw Error(Errc::parse_error, where + "expected an object");
        if (!c.contains("query") || !c["query"].is_string() || c["query"].get<std::string>().empty()) {
            throw Error(Errc::parse_error, where + "\"query\" must be a non-empty string");
        }
        const auto cat = c.contains("category") && c["category"].is_string()
                             ? parse_query_category(c["category"].get<std::string>())
                             : std::nullopt;
        if (!cat) throw Error(Errc::parse_error, where + "\"category\" must be \"direct\" or \"analytical\"");
        if (!c.contains("relevant") || !c["relevant"].is_array() || c["relevant"].empty()) {
            throw Error(Errc::parse_error, where + "\"relevant\" must be a non-empty array");
        }
        RetrievalEvalCase rc{c["query"].get<std::string>(), *cat, {}};
        for (const auto& id : c["relevant"]) {
            if (!id.is_string()) throw Error(Errc::parse_error, where + "relevant ids must be strings");
            rc.relevant.push_back(id.get<std::string>());
        }
        out.push_back(std::move(rc));
    }
    return out;
}

std::vector<RetrievalEvalCase> load_eval_cases(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto doc = json::parse(ss.str(), nullptr, false);
    if (doc.is_discarded()) throw Error(Errc::parse_error, path + " is not valid JSON");
    return parse_eval_cases(doc);
}

json to_json(const RetrievalEvalCase& c) {
    return json{{"query", c.query}, {"category", to_string(c.category)}, {"relevant", c.relevant}};
}

double recall_at_k(std::span<const std::string> ranked, std::span<const std::string> relevant, std::size_t k) {
    if (relevant.empty()) throw Error(Errc::invalid_argument, "recall: relevant set is empty");
    if (k == 0) throw Error(Errc::invalid_argument, "recall: k must be positive");
    const std::set<std::string> rel(relevant.begin(), relevant.end());
    std::set<std::string> found;
    for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
        if (rel.contains(ranked[i])) found.insert(ranked[i]);
    }
    return static_cast<double>(found.size()) / static_cast<double>(rel.size());
}

double mrr_at_k(std::span<const std::string> ranked, std::span<const std::string> relevant, std::size_t k) {
    if (relevant.empty()) throw Error(Errc::invalid_argument, "mrr: relevant set is empty");
    if (k == 0) throw Error(Errc::invalid_argument, "mrr: k must be positive");
    for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
        if (std::find(relevant.begin(), relevant.end(), ranked[i]) != relevant.end()) {
            return 1.0 / static_cast<double>(i + 1);
        }
    }
    return 0.0;
}

std::vector<RetrievalCondition> standard_conditions() {
    auto make = [](std::string name, KindSet kinds) {
        RetrievalCondition c{std::move(name), {}};
        c.fusion.allowed_kinds = kinds;
        return c;
    };
    const auto t = KindSet::only(ArtifactKind::transcript);
    return {make("transcripts", t), make("transcripts+concept_maps", KindSet(t).insert(ArtifactKind::concept_map)),
            make("transcripts+assessments", KindSet(t).insert(ArtifactKind::assessment)),
            make("all_artifacts", KindSet::all())};
}

const RetrievalRow* RetrievalReport::row(std::string_view condition, QueryCategory category) const {
    for (const auto& r : rows) {
        if (r.condition == condition && r.category == category) return &r;
    }
    return nullptr;
}

RetrievalReport run_retrieval_eval(const std::vector<RetrievalEvalCase>& cases,
                                   const std::vector<RetrievalCondition>& conditions, const index::Retriever& retriever,
                                   std::uint64_t seed) {
    RetrievalReport report;
    report.seed = seed;
    std::set<std::string> indexed;
    for (auto k : kAllArtifactKinds) {
        for (const auto& d : retriever.index().documents(k)) indexed.insert(d.discussion_id);
    }
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        report.cases.push_back(cases[i]);
        const auto& c = cases[i];
        const auto missing = std::find_if(c.relevant.begin(), c.relevant.end(),
                                          [&](const std::string& id) { return !indexed.contains(id); });
        if (c.relevant.empty()) {
            report.warnings.push_back("case " + std::to_string(i + 1) + " skipped: no relevant discussions");
        } else if (missing != c.relevant.end()) {
            report.warnings.push_back("case " + std::to_string(i + 1) + " skipped: discussion " + *missing +
                                      " is not indexed");
        } else {
            usable.push_back(i);
        }
    }
    for (const auto& cond : conditions) {
        auto fusion = cond.fusion;
        fusion.top_n = std::max<std::size_t>(fusion.top_n, 10);
        fusion.check();
        for (auto category : {QueryCategory::direct, QueryCategory::analytical}) {
            RetrievalRow row{cond.name, category, 0, 0.0, 0.0, 0.0};
            for (auto i : usable) {
                const auto& c = cases[i];
                if (c.category != category) continue;
                CaseOutcome o{cond.name, i, {}, 0.0, 0.0, 0.0};
                for (const auto& hit : retriever.search_sessions(c.query, fusion)) o.ranked.push_back(hit.discussion_id);
                o.recall_at_5 = recall_at_k(o.ranked, c.relevant, 5);
                o.recall_at_10 = recall_at_k(o.ranked, c.relevant, 10);
                o.mrr_at_5 = mrr_at_k(o.ranked, c.relevant, 5);
                ++row.cases;
                row.recall_at_5 += o.recall_at_5;
                row.recall_at_10 += o.recall_at_10;
                row.mrr_at_5 += o.mrr_at_5;
                report.outcomes.push_back(std::move(o));
            }
            if (row.cases > 0) {
                const double n = static_cast<double>(row.cases);
                row.recall_at_5 /= n;
                row.recall_at_10 /= n;
                row.mrr_at_5 /= n;
            }
            report.rows.push_back(row);
        }
    }
    return report;
}

json to_json(const RetrievalReport& r) {
    json cases = json::array();
    for (const auto& c : r.cases) cases.push_back(to_json(c));
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"condition", row.condition},
                        {"category", to_string(row.category)},
                        {"cases", row.cases},
                        {"recall_at_5", row.recall_at_5},
                        {"recall_at_10", row.recall_at_10},
                        {"mrr_at_5", row.mrr_at_5}});
    }
    json outcomes = json::array();
    for (const auto& o : r.outcomes) {
        outcomes.push_back({{"condition", o.condition},
                            {"case", o.case_index + 1},
                            {"ranked", o.ranked},
                            {"recall_at_5", o.recall_at_5},
                            {"recall_at_10", o.recall_at_10},
                            {"mrr_at_5", o.mrr_at_5}});
    }
    return json{{"report", "retrieval"},
                {"seed", r.seed},
                {"cases", cases},
                {"rows", rows},
                {"outcomes", outcomes},
                {"warnings", r.warnings}};
}

std::string to_text(const RetrievalReport& r) {
    std::vector<std::string> conditions;
    for (const auto& row : r.rows) {
        if (std::find(conditions.begin(), conditions.end(), row.condition) == conditions.end()) {
            conditions.push_back(row.condition);
        }
    }
    std::size_t width = std::string("Condition").size();
    for (const auto& c : conditions) width = std::max(width, c.size());
    const std::size_t col = 8;
    std::ostringstream out;
    out << "Retrieval evaluation (seed " << r.seed << ")\n";
    out << pad("", width);
    for (auto cat : {QueryCategory::direct, QueryCategory::analytical}) {
        std::size_t n = 0;
        for (const auto& row : r.rows) {
            if (row.category == cat) n = std::max(n, row.cases);
        }
        out << "  | " << pad(std::string(to_string(cat)) + " (n=" + std::to_string(n) + ")", 3 * col + 2);
    }
    out << "\n" << pad("Condition", width);
    for (int i = 0; i < 2; ++i) out << "  | " << lpad("R@5", col) << " " << lpad("R@10", col) << " " << lpad("MRR@5", col);
    out << "\n" << std::string(width + 2 * (3 * col + 6), '-') << "\n";
    for (const auto& c : conditions) {
        out << pad(c, width);
        for (auto cat : {QueryCategory::direct, QueryCategory::analytical}) {
            const auto* row = r.row(c, cat);
            out << "  | ";
            if (!row || row->cases == 0) {
                out << lpad("-", col) << " " << lpad("-", col) << " " << lpad("-", col);
            } else {
                out << lpad(fixed3(row->recall_at_5), col) << " " << lpad(fixed3(row->recall_at_10), col) << " "
                    << lpad(fixed3(row->mrr_at_5), col);
            }
        }
        out << "\n";
    }
    for (const auto& w : r.warnings) out << "warning: " << w << "\n";
    return out.str();
}

}  // namespace collab::eval
