#include "indexnet/calendar.hpp"

#include <cstdio>

#include "indexnet/errors.hpp"

namespace indexnet {

std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);                 // [0, 399]
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;                        // [0, 365]
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;             // [0, 146096]
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

int weekday_from_days(std::int64_t days) {
    // 1970-01-01 was a Thursday; Monday = 0 puts Thursday at 3.
    return static_cast<int>(((days + 3) % 7 + 7) % 7);
}

static int days_in_month(int year, int month) {
    static const int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2) {
        const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
        return leap ? 29 : 28;
    }
    return lengths[month - 1];
}

static void check_tau(int tau_minutes) {
    if (tau_minutes <= 0 || 60 % tau_minutes != 0) {
        throw ConfigError("sampling interval must be a positive divisor of 60, got " +
                          std::to_string(tau_minutes));
    }
}

CalendarFields parse_timestamp(const std::string& text, int tau_minutes) {
    check_tau(tau_minutes);
    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    char dsep1 = 0, dsep2 = 0, msep = 0;
    // Seconds are optional; a match of 8 conversions stops before them.
    int matched = std::sscanf(text.c_str(), "%4d%c%2d%c%2d%*1[ T]%2d%c%2d:%2d",
                              &year, &dsep1, &month, &dsep2, &day, &hour, &msep, &minute,
                              &second);
    if (matched < 8 || (dsep1 != '-' && dsep1 != '/') || dsep2 != dsep1 || msep != ':') {
        throw DataError("unparseable timestamp '" + text + "'");
    }
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month) ||
        hour < 0 || hour > 23 || minute < 0 || minute > 59 ||
        second < 0 || second > 59) {
        throw DataError("timestamp component out of range in '" + text + "'");
    }
    CalendarFields f;
    f.minute_idx = minute / tau_minutes;
    f.hour = hour;
    f.day_of_week = weekday_from_days(days_from_civil(year, month, day));
    f.day_of_month = day - 1;
    f.month = month - 1;
    f.has_month_fields = true;
    return f;
}

std::int64_t minutes_from_epoch(const std::string& text) {
    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    char dsep1 = 0, dsep2 = 0, msep = 0;
    int matched = std::sscanf(text.c_str(), "%4d%c%2d%c%2d%*1[ T]%2d%c%2d:%2d",
                              &year, &dsep1, &month, &dsep2, &day, &hour, &msep, &minute,
                              &second);
    if (matched < 8) throw DataError("unparseable timestamp '" + text + "'");
    return days_from_civil(year, month, day) * 1440 + hour * 60 + minute;
}

CalendarFields index_proxy_features(std::int64_t t, int tau_minutes) {
    check_tau(tau_minutes);
    const std::int64_t steps_per_hour = 60 / tau_minutes;
    CalendarFields f;
    f.minute_idx = static_cast<int>(t % steps_per_hour);
    f.hour = static_cast<int>((t / steps_per_hour) % 24);
    f.day_of_week = static_cast<int>((t / (24 * steps_per_hour)) % 7);
    f.day_of_month = 0;
    f.month = 0;
    f.has_month_fields = false;
    return f;
}

} // namespace indexnet
