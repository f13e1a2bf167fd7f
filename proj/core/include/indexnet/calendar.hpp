#pragma once

#include <cstdint>
#include <string>

namespace indexnet {

// Calendar position of one time step, already shaped for table lookup:
// minute_idx is the minute slot within the hour (0..K-1 with K = 60/tau),
// and day_of_month/month are zero-based so they index their tables
// directly. When the fields were reconstructed from a row index instead of
// a real timestamp, month-level values are unknowable and has_month_fields
// is false; month-level retrieval must then fail loudly rather than
// fabricate rows.
struct CalendarFields {
    int minute_idx = 0;    // 0..(60/tau)-1
    int hour = 0;          // 0..23
    int day_of_week = 0;   // 0..6, Monday = 0
    int day_of_month = 0;  // 0..30 (calendar day minus one)
    int month = 0;         // 0..11 (calendar month minus one)
    bool has_month_fields = true;
};

// Days since 1970-01-01 (negative before). Howard Hinnant's civil-days
// algorithm; exact over the Gregorian range.
std::int64_t days_from_civil(int year, int month, int day);

// Monday = 0 .. Sunday = 6.
int weekday_from_days(std::int64_t days);

// Parses "YYYY-MM-DD HH:MM" or "YYYY-MM-DD HH:MM:SS" (a 'T' separator and
// '/' date separators are tolerated) and buckets the minute into slots of
// tau_minutes. Throws DataError on malformed or out-of-range components,
// echoing the offending text.
CalendarFields parse_timestamp(const std::string& text, int tau_minutes);

// Minutes since the epoch, for stride inference between consecutive rows.
std::int64_t minutes_from_epoch(const std::string& timestamp_text);

// Fields for datasets with no date column: the row index t stands in for
// the clock. With steps_per_hour = 60 / tau_minutes,
//   minute_idx  = t mod steps_per_hour
//   hour        = (t / steps_per_hour) mod 24
//   day_of_week = (t / (24 * steps_per_hour)) mod 7
// Month-level fields are flagged absent.
CalendarFields index_proxy_features(std::int64_t t, int tau_minutes);

} // namespace indexnet
