#include "cdrkit/timeutil.hpp"

#include <array>
#include <cstdio>

namespace cdrkit {

namespace {

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(std::int64_t y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = yy + (m <= 2);
}

bool is_leap(std::int64_t y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(std::int64_t y, int m) {
    static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30,
                                                  31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return kDays[static_cast<std::size_t>(m - 1)];
}

bool all_digits(std::string_view s) {
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    return !s.empty();
}

int to_int(std::string_view s) {
    int v = 0;
    for (char c : s) v = v * 10 + (c - '0');
    return v;
}

}  // namespace

std::optional<UtcSeconds> parse_utc(std::string_view text) {
    // Fixed layout: YYYY-MM-DDTHH:MM:SSZ (20 chars).
    if (text.size() != 20) return std::nullopt;
    if (text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
        text[16] != ':' || text[19] != 'Z') {
        return std::nullopt;
    }
    const auto year_s = text.substr(0, 4);
    const auto mon_s = text.substr(5, 2);
    const auto day_s = text.substr(8, 2);
    const auto hour_s = text.substr(11, 2);
    const auto min_s = text.substr(14, 2);
    const auto sec_s = text.substr(17, 2);
    if (!all_digits(year_s) || !all_digits(mon_s) || !all_digits(day_s) ||
        !all_digits(hour_s) || !all_digits(min_s) || !all_digits(sec_s)) {
        return std::nullopt;
    }
    const int year = to_int(year_s);
    const int mon = to_int(mon_s);
    const int day = to_int(day_s);
    const int hour = to_int(hour_s);
    const int min = to_int(min_s);
    const int sec = to_int(sec_s);
    if (mon < 1 || mon > 12) return std::nullopt;
    if (day < 1 || day > days_in_month(year, mon)) return std::nullopt;
    if (hour > 23 || min > 59 || sec > 59) return std::nullopt;
    const std::int64_t days = days_from_civil(year, mon, day);
    return days * 86400 + hour * 3600 + min * 60 + sec;
}

std::string format_utc(UtcSeconds t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    std::int64_t y;
    int m, d;
    civil_from_days(days, y, m, d);
    const int hour = static_cast<int>(rem / 3600);
    const int min = static_cast<int>((rem % 3600) / 60);
    const int sec = static_cast<int>(rem % 60);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%04lld-%02d-%02dT%02d:%02d:%02dZ",
                  static_cast<long long>(y), m, d, hour, min, sec);
    return buf;
}

int month_index(UtcSeconds t) {
    std::int64_t days = t / 86400;
    if (t % 86400 < 0) --days;
    std::int64_t y;
    int m, d;
    civil_from_days(days, y, m, d);
    return static_cast<int>((y - 1970) * 12 + (m - 1));
}

UtcSeconds month_start(int month_idx) {
    const std::int64_t y = 1970 + (month_idx >= 0 ? month_idx / 12
                                                  : (month_idx - 11) / 12);
    const int m = static_cast<int>(month_idx - (y - 1970) * 12) + 1;
    return days_from_civil(y, m, 1) * 86400;
}

}  // namespace cdrkit
