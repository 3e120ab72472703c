#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace collab {

// Milliseconds since the Unix epoch, UTC.
struct Timestamp {
    std::int64_t epoch_ms = 0;

    auto operator<=>(const Timestamp&) const = default;
};

// "2026-01-31T09:15:00.250Z"
std::string format_iso8601(Timestamp ts);
// Accepts the format above, with or without the millisecond part. Throws on malformed input.
Timestamp parse_iso8601(std::string_view text);

using Clock = std::function<Timestamp()>;

Clock system_clock();
Clock fixed_clock(Timestamp ts);
// Starts at `start` and advances by `step_ms` on every call. Thread-safe.
Clock stepping_clock(Timestamp start, std::int64_t step_ms);

}  // namespace collab
