#include "collab/core/time.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <memory>

#include "collab/core/error.hpp"

namespace collab {

namespace {

// Howard Hinnant's civil-from-days / days-from-civil.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y += m <= 2;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

std::string format_iso8601(Timestamp ts) {
    const std::int64_t days = floor_div(ts.epoch_ms, 86400000);
    std::int64_t rem = ts.epoch_ms - days * 86400000;
    std::int64_t y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    const int hh = static_cast<int>(rem / 3600000);
    rem %= 3600000;
    const int mm = static_cast<int>(rem / 60000);
    rem %= 60000;
    const int ss = static_cast<int>(rem / 1000);
    const int ms = static_cast<int>(rem % 1000);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02d:%02d:%02d.%03dZ",
                  static_cast<long long>(y), m, d, hh, mm, ss, ms);
    return buf;
}

Timestamp parse_iso8601(std::string_view text) {
    long long y = 0;
    unsigned mo = 0, d = 0, hh = 0, mi = 0, ss = 0, ms = 0;
    const std::string s(text);
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%lld-%u-%uT%u:%u:%u%n", &y, &mo, &d, &hh, &mi, &ss, &consumed) != 6) {
        throw Error(Errc::parse_error, "malformed timestamp: " + s);
    }
    std::size_t pos = static_cast<std::size_t>(consumed);
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        unsigned digits = 0;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
            if (digits < 3) ms = ms * 10 + static_cast<unsigned>(s[pos] - '0');
            ++digits;
            ++pos;
        }
        if (digits == 0) throw Error(Errc::parse_error, "malformed timestamp: " + s);
        for (; digits < 3; ++digits) ms *= 10;
    }
    if (pos != s.size() - 1 || s[pos] != 'Z' || mo < 1 || mo > 12 || d < 1 || d > 31 ||
        hh > 23 || mi > 59 || ss > 60) {
        throw Error(Errc::parse_error, "malformed timestamp: " + s);
    }
    const std::int64_t days = days_from_civil(y, mo, d);
    return Timestamp{days * 86400000 + hh * 3600000LL + mi * 60000LL + ss * 1000LL + ms};
}

Clock system_clock() {
    return [] {
        const auto now = std::chrono::system_clock::now().time_since_epoch();
        return Timestamp{std::chrono::duration_cast<std::chrono::milliseconds>(now).count()};
    };
}

Clock fixed_clock(Timestamp ts) {
    return [ts] { return ts; };
}

Clock stepping_clock(Timestamp start, std::int64_t step_ms) {
    auto next = std::make_shared<std::atomic<std::int64_t>>(start.epoch_ms);
    return [next, step_ms] { return Timestamp{next->fetch_add(step_ms)}; };
}

}  // namespace collab
