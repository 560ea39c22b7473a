#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace dupescan {

/// Calendar date at day granularity, stored as days since 1970-01-01.
struct Date {
    int32_t days = 0;

    auto operator<=>(const Date&) const = default;

    Date plus_days(int32_t n) const { return Date{days + n}; }

    /// Signed day difference (*this - other).
    int32_t operator-(const Date& other) const { return days - other.days; }
};

inline std::optional<Date> make_date(int year, unsigned month, unsigned day) {
    using namespace std::chrono;
    year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                       std::chrono::day{day}};
    if (!ymd.ok()) return std::nullopt;
    return Date{static_cast<int32_t>(sys_days{ymd}.time_since_epoch().count())};
}

/// Parses strict ISO-8601 "YYYY-MM-DD"; rejects impossible calendar dates.
inline std::optional<Date> parse_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (!digit(s[i])) return std::nullopt;
    }
    int y = (s[0] - '0') * 1000 + (s[1] - '0') * 100 + (s[2] - '0') * 10 + (s[3] - '0');
    unsigned m = static_cast<unsigned>((s[5] - '0') * 10 + (s[6] - '0'));
    unsigned d = static_cast<unsigned>((s[8] - '0') * 10 + (s[9] - '0'));
    return make_date(y, m, d);
}

inline std::string format_date(Date date) {
    using namespace std::chrono;
    year_month_day ymd{sys_days{std::chrono::days{date.days}}};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

} // namespace dupescan
