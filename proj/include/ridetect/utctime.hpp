#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace ridetect {

/// UTC instant with second resolution.
struct UtcTime {
    std::int64_t secs = 0;  // seconds since 1970-01-01T00:00:00Z

    auto operator<=>(const UtcTime&) const = default;
};

inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSixHours = 6 * kSecondsPerHour;

UtcTime make_utc(int year, int month, int day, int hour, int minute = 0, int second = 0);

struct CivilTime {
    int year;
    int month;
    int day;
    int hour;
    int minute;
    int second;
};

CivilTime civil_from_utc(UtcTime t);

int utc_year(UtcTime t);
int utc_hour(UtcTime t);

std::string to_iso8601(UtcTime t);

/// Parses "YYYY-MM-DDTHH:MM:SSZ"; throws ParseError on malformed input.
UtcTime parse_iso8601(std::string_view text, const std::string& file = "<memory>", long line = 0);

}  // namespace ridetect
