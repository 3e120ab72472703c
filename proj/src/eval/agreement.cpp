#include "collab/eval/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "collab/core/error.hpp"
#include "collab/core/text.hpp"

namespace collab::eval {

using nlohmann::json;

namespace {

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::string(text::trim(field)));
            field.clear();
        } else {
            field += c;
        }
    }
    out.push_back(std::string(text::trim(field)));
    return out;
}

std::string group_of(const std::string& unit) {
    const auto slash = unit.rfind('/');
    return slash == std::string::npos ? std::string() : unit.substr(slash + 1);
}

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string cell(std::string s, std::size_t width) {
    if (s.size() < width) s.insert(0, width - s.size(), ' ');
    return s;
}

AgreementRow agreement_row(std::string group, const RatingMatrix& m, std::size_t iterations, std::uint64_t seed) {
    AgreementRow row;
    row.group = std::move(group);
    row.units = m.units.size();
    try {
        row.alpha = krippendorff_alpha(m).alpha;
        row.ci = bootstrap_alpha_ci(m, iterations, seed);
        if (row.ci->skipped > 0) {
            row.notes.push_back(std::to_string(row.ci->skipped) + " bootstrap resamples had undefined alpha");
        }
    } catch (const Error& e) {
        row.notes.push_back(e.what());
    }
    std::vector<double> x, y;
    std::vector<std::pair<double, double>> pairs;
    for (const auto& r : m.cells) {
        if (r[0] && r[1]) {
            x.push_back(*r[0]);
            y.push_back(*r[1]);
            pairs.emplace_back(*r[0], *r[1]);
        }
    }
    if (!pairs.empty()) row.mad = mad_pairs(pairs);
    try {
        row.spearman = spearman_rho(x, y);
    } catch (const Error& e) {
        row.notes.push_back(e.what());
    }
    return row;
}

}  // namespace

RatingMatrix parse_ratings_csv(std::string_view text) {
    RatingMatrix m;
    std::map<std::string, std::size_t> unit_at, rater_at;
    std::map<std::pair<std::size_t, std::size_t>, std::optional<double>> cells;
    std::size_t line_no = 0, pos = 0;
    bool header = false;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.ends_with('\r')) line.remove_suffix(1);
        if (text::trim(line).empty()) continue;
        const auto fields = split_csv(line);
        const std::string where = "ratings line " + std::to_string(line_no) + ": ";
        if (!header) {
            if (fields != std::vector<std::string>{"unit_id", "rater_id", "score"}) {
                throw Error(Errc::parse_error, where + "expected header unit_id,rater_id,score");
            }
            header = true;
            continue;
        }
        if (fields.size() != 3) throw Error(Errc::parse_error, where + "expected 3 fields");
        if (fields[0].empty() || fields[1].empty()) throw Error(Errc::parse_error, where + "empty unit or rater id");
        std::optional<double> score;
        if (!fields[2].empty()) {
            std::size_t used = 0;
            try {
                score = std::stod(fields[2], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != fields[2].size() || !std::isfinite(*score)) {
                throw Error(Errc::parse_error, where + "score \"" + fields[2] + "\" is not a number");
            }
        }
        auto [u, new_unit] = unit_at.try_emplace(fields[0], m.units.size());
        if (new_unit) m.units.push_back(fields[0]);
        auto [r, new_rater] = rater_at.try_emplace(fields[1], m.raters.size());
        if (new_rater) m.raters.push_back(fields[1]);
        if (!cells.try_emplace({u->second, r->second}, score).second) {
            throw Error(Errc::parse_error, where + "duplicate rating for " + fields[0] + " by " + fields[1]);
        }
    }
    if (!header) throw Error(Errc::parse_error, "ratings: missing header");
    m.cells.assign(m.units.size(), std::vector<std::optional<double>>(m.raters.size()));
    for (const auto& [key, score] : cells) m.cells[key.first][key.second] = score;
    return m;
}

RatingMatrix load_ratings_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_ratings_csv(ss.str());
}

RatingMatrix rating_matrix_from_assessments(
    const std::vector<std::pair<std::string, std::vector<SevenCAssessment>>>& raters) {
    RatingMatrix m;
    std::set<std::string> discussions;
    for (const auto& [name, list] : raters) {
        m.raters.push_back(name);
        for (const auto& a : list) discussions.insert(a.discussion_id);
    }
    for (const auto& did : discussions) {
        for (auto dim : kAllDimensions) {
            m.units.push_back(did + "/" + std::string(to_string(dim)));
            std::vector<std::optional<double>> row(raters.size());
            for (std::size_t r = 0; r < raters.size(); ++r) {
                for (const auto& a : raters[r].second) {
                    if (a.discussion_id != did) continue;
                    if (const auto* d = a.find(dim)) row[r] = d->score;
                }
            }
            m.cells.push_back(std::move(row));
        }
    }
    return m;
}

AgreementReport run_agreement_eval(const RatingMatrix& m, std::size_t iterations, std::uint64_t seed) {
    m.check();
    AgreementReport report;
    report.seed = seed;
    report.iterations = iterations;
    report.raters = m.raters;
    for (std::size_t u = 0; u < m.units.size(); ++u) {
        if (m.present(u) < 2) report.excluded_units.push_back(m.units[u]);
    }
    report.rows.push_back(agreement_row("all", m, iterations, seed));

    std::map<std::string, RatingMatrix> groups;
    for (std::size_t u = 0; u < m.units.size(); ++u) {
        const auto g = group_of(m.units[u]);
        if (g.empty()) continue;
        auto& gm = groups[g];
        gm.raters = m.raters;
        gm.units.push_back(m.units[u]);
        gm.cells.push_back(m.cells[u]);
    }
    for (const auto& [name, gm] : groups) report.rows.push_back(agreement_row(name, gm, iterations, seed));
    return report;
}

json to_json(const AgreementReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        json j{{"group", row.group}, {"units", row.units}, {"notes", row.notes}};
        j["alpha"] = row.alpha ? json(*row.alpha) : json(nullptr);
        j["alpha_ci"] = row.ci ? json{{"low", row.ci->low}, {"high", row.ci->high}, {"skipped", row.ci->skipped}}
                               : json(nullptr);
        j["spearman"] = row.spearman ? json{{"rho", row.spearman->rho}, {"p", row.spearman->p}} : json(nullptr);
        j["mad"] = row.mad ? json(*row.mad) : json(nullptr);
        rows.push_back(std::move(j));
    }
    return json{{"report", "agreement"},
                {"seed", r.seed},
                {"bootstrap_iterations", r.iterations},
                {"raters", r.raters},
                {"excluded_units", r.excluded_units},
                {"rows", rows}};
}

std::string to_text(const AgreementReport& r) {
    std::size_t width = 5;
    for (const auto& row : r.rows) width = std::max(width, row.group.size());
    std::ostringstream out;
    out << "Rater agreement (seed " << r.seed << ", " << r.iterations << " bootstrap iterations)\n";
    auto pad = [&](std::string s) {
        s.resize(std::max(s.size(), width), ' ');
        return s;
    };
    out << pad("Group") << cell("Units", 7) << cell("alpha", 9) << cell("95% CI", 20) << cell("rho", 9)
        << cell("p", 9) << cell("MAD", 9) << "\n";
    out << std::string(width + 63, '-') << "\n";
    for (const auto& row : r.rows) {
        out << pad(row.group) << cell(std::to_string(row.units), 7)
            << cell(row.alpha ? fixed3(*row.alpha) : "-", 9)
            << cell(row.ci ? "[" + fixed3(row.ci->low) + ", " + fixed3(row.ci->high) + "]" : "-", 20)
            << cell(row.spearman ? fixed3(row.spearman->rho) : "-", 9)
            << cell(row.spearman ? fixed3(row.spearman->p) : "-", 9) << cell(row.mad ? fixed3(*row.mad) : "-", 9)
            << "\n";
    }
    if (!r.excluded_units.empty()) {
        out << "excluded (fewer than two ratings): " << r.excluded_units.size() << " unit(s)\n";
    }
    return out.str();
}

}  // namespace collab::eval
