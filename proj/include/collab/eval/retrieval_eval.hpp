#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "collab/index/retrieval.hpp"

namespace collab::eval {

enum class QueryCategory { direct, analytical };
std::string_view to_string(QueryCategory c);
std::optional<QueryCategory> parse_query_category(std::string_view s);

struct RetrievalEvalCase {
    std::string query;
    QueryCategory category = QueryCategory::direct;
    std::vector<std::string> relevant;  // discussion ids, non-empty
};

// [{"query": ..., "category": "direct"|"analytical", "relevant": [...]}, ...]
// Throws Error(parse_error) naming the offending case.
std::vector<RetrievalEvalCase> parse_eval_cases(const nlohmann::json& doc);
std::vector<RetrievalEvalCase> load_eval_cases(const std::string& path);
nlohmann::json to_json(const RetrievalEvalCase& c);

// |relevant in top k| / |relevant|. Throws Error(invalid_argument) when relevant is empty or k is 0.
double recall_at_k(std::span<const std::string> ranked, std::span<const std::string> relevant, std::size_t k);
// 1 / rank of the first relevant id within the top k, else 0.
double mrr_at_k(std::span<const std::string> ranked, std::span<const std::string> relevant, std::size_t k);

struct RetrievalCondition {
    std::string name;
    index::FusionConfig fusion;
};

// Transcripts only, transcripts + concept maps, transcripts + assessments, all three.
std::vector<RetrievalCondition> standard_conditions();

struct RetrievalRow {
    std::string condition;
    QueryCategory category = QueryCategory::direct;
    std::size_t cases = 0;
    double recall_at_5 = 0.0;
    double recall_at_10 = 0.0;
    double mrr_at_5 = 0.0;
};

struct CaseOutcome {
    std::string condition;
    std::size_t case_index = 0;
    std::vector<std::string> ranked;
    double recall_at_5 = 0.0;
    double recall_at_10 = 0.0;
    double mrr_at_5 = 0.0;
};

struct RetrievalReport {
    std::uint64_t seed = 0;
    std::vector<RetrievalEvalCase> cases;
    std::vector<RetrievalRow> rows;  // condition order, then direct before analytical
    std::vector<CaseOutcome> outcomes;
    std::vector<std::string> warnings;

    const RetrievalRow* row(std::string_view condition, QueryCategory category) const;
};

// Each condition searches with its own kinds and at least 10 results. Cases
// naming a discussion that is not indexed are skipped with a warning.
RetrievalReport run_retrieval_eval(const std::vector<RetrievalEvalCase>& cases,
                                   const std::vector<RetrievalCondition>& conditions, const index::Retriever& retriever,
                                   std::uint64_t seed = 0);

nlohmann::json to_json(const RetrievalReport& r);
// Aligned table: one row per condition, Recall@5 / Recall@10 / MRR@5 per category.
std::string to_text(const RetrievalReport& r);

}  // namespace collab::eval
