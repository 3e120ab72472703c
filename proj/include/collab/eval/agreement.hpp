#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "collab/core/types.hpp"
#include "collab/eval/stats.hpp"

namespace collab::eval {

// Header "unit_id,rater_id,score"; a blank score marks a missing cell. Units and
// raters keep first-appearance order. Throws Error(parse_error) with the line number.
RatingMatrix parse_ratings_csv(std::string_view text);
RatingMatrix load_ratings_csv(const std::string& path);

// Units are "<discussion_id>/<dimension>", one rater per entry. A discussion a
// rater did not assess leaves that rater's cells empty.
RatingMatrix rating_matrix_from_assessments(
    const std::vector<std::pair<std::string, std::vector<SevenCAssessment>>>& raters);

struct AgreementRow {
    std::string group;  // "all", or the unit-id suffix after the last '/'
    std::size_t units = 0;
    std::optional<double> alpha;
    std::optional<BootstrapCI> ci;
    std::optional<Correlation> spearman;  // first two raters, units both scored
    std::optional<double> mad;
    std::vector<std::string> notes;
};

struct AgreementReport {
    std::uint64_t seed = 0;
    std::size_t iterations = 0;
    std::vector<std::string> raters;
    std::vector<std::string> excluded_units;
    std::vector<AgreementRow> rows;
};

AgreementReport run_agreement_eval(const RatingMatrix& m, std::size_t iterations = 10000, std::uint64_t seed = 0);

nlohmann::json to_json(const AgreementReport& r);
std::string to_text(const AgreementReport& r);

}  // namespace collab::eval
