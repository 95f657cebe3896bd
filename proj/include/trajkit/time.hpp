#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "trajkit/errors.hpp"

namespace trajkit {

/// All instants are UTC with second resolution; all durations are whole seconds.
using timestamp = std::chrono::sys_seconds;
using duration = std::chrono::seconds;

namespace detail {

// Civil <-> epoch-day conversions (proleptic Gregorian), Howard Hinnant's
// algorithms. Valid far beyond any plausible GPS log.
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct civil_date {
    std::int64_t year;
    unsigned month;
    unsigned day;
};

constexpr civil_date civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {y + (m <= 2), m, d};
}

constexpr unsigned days_in_month(std::int64_t y, unsigned m) {
    constexpr unsigned lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2) {
        const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        return leap ? 29 : 28;
    }
    return lengths[m - 1];
}

} // namespace detail

inline timestamp make_timestamp(std::int64_t year, unsigned month, unsigned day, unsigned hour,
                                unsigned minute, unsigned second) {
    if (month < 1 || month > 12 || day < 1 || day > detail::days_in_month(year, month) ||
        hour > 23 || minute > 59 || second > 59) {
        throw value_error("invalid civil time");
    }
    const std::int64_t days = detail::days_from_civil(year, month, day);
    return timestamp{duration{days * 86400 + hour * 3600 + minute * 60 + second}};
}

/// Formats as ISO-8601 UTC with trailing Z, e.g. "2010-03-01T08:00:00Z".
inline std::string format_iso8601(timestamp t) {
    const std::int64_t s = t.time_since_epoch().count();
    std::int64_t days = s / 86400;
    std::int64_t rem = s % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    const auto [y, m, d] = detail::civil_from_days(days);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                  static_cast<long long>(y), m, d, static_cast<long long>(rem / 3600),
                  static_cast<long long>(rem / 60 % 60), static_cast<long long>(rem % 60));
    return buf;
}

/// Strict parse of the format emitted by format_iso8601.
inline timestamp parse_iso8601(std::string_view text) {
    const auto fail = [&] { throw value_error("malformed ISO-8601 timestamp: '" + std::string(text) + "'"); };
    if (text.size() != 20) fail();
    if (text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
        text[16] != ':' || text[19] != 'Z') {
        fail();
    }
    const auto num = [&](std::size_t pos, std::size_t len) -> std::int64_t {
        std::int64_t v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (text[i] < '0' || text[i] > '9') fail();
            v = v * 10 + (text[i] - '0');
        }
        return v;
    };
    const std::int64_t year = num(0, 4);
    const auto month = static_cast<unsigned>(num(5, 2));
    const auto day = static_cast<unsigned>(num(8, 2));
    const auto hour = static_cast<unsigned>(num(11, 2));
    const auto minute = static_cast<unsigned>(num(14, 2));
    const auto second = static_cast<unsigned>(num(17, 2));
    return make_timestamp(year, month, day, hour, minute, second);
}

} // namespace trajkit
