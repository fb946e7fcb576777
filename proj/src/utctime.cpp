#include "ridetect/utctime.hpp"

#include <cstdio>

#include "ridetect/errors.hpp"

namespace ridetect {
namespace {

// Howard Hinnant's civil-date algorithms.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153U * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2U) / 5U +
                         static_cast<unsigned>(d) - 1U;
    const unsigned doe = yoe * 365U + yoe / 4U - yoe / 100U + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    y = static_cast<int>(yr + (m <= 2));
}

}  // namespace

UtcTime make_utc(int year, int month, int day, int hour, int minute, int second) {
    return UtcTime{days_from_civil(year, month, day) * 86400 + hour * kSecondsPerHour +
                   minute * 60 + second};
}

CivilTime civil_from_utc(UtcTime t) {
    std::int64_t days = t.secs / 86400;
    std::int64_t rem = t.secs % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    CivilTime c{};
    civil_from_days(days, c.year, c.month, c.day);
    c.hour = static_cast<int>(rem / 3600);
    c.minute = static_cast<int>((rem % 3600) / 60);
    c.second = static_cast<int>(rem % 60);
    return c;
}

int utc_year(UtcTime t) { return civil_from_utc(t).year; }

int utc_hour(UtcTime t) { return civil_from_utc(t).hour; }

std::string to_iso8601(UtcTime t) {
    const CivilTime c = civil_from_utc(t);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", c.year, c.month, c.day,
                  c.hour, c.minute, c.second);
    return buf;
}

UtcTime parse_iso8601(std::string_view text, const std::string& file, long line) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    char z = '\0';
    const std::string owned(text);
    if (std::sscanf(owned.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &s, &z) !=
            7 ||
        z != 'Z') {
        throw ParseError(file, line, "malformed ISO-8601 timestamp '" + owned + "'");
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 ||
        s > 60) {
        throw ParseError(file, line, "timestamp fields out of range in '" + owned + "'");
    }
    const UtcTime t = make_utc(y, mo, d, h, mi, s);
    const CivilTime back = civil_from_utc(t);
    if (back.year != y || back.month != mo || back.day != d) {
        throw ParseError(file, line, "no such calendar day in '" + owned + "'");
    }
    return t;
}

}  // namespace ridetect
