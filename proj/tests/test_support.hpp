#pragma once

// Shared fixtures for the test binaries: in-memory synthetic datasets with
// known structure, plus small filesystem helpers for the CLI tests.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "indexnet/dataset.hpp"
#include "indexnet/rng.hpp"

namespace testsupport {

// Builds an hourly dataset with index-synthesized calendar fields and
// auto (70/10/20) split borders.
inline indexnet::TimeSeriesDataset make_proxy_dataset(std::size_t rows, std::size_t channels,
                                                      int tau_minutes = 60) {
    indexnet::TimeSeriesDataset ds;
    ds.values = indexnet::DenseMatrix(rows, channels);
    ds.channel_names.resize(channels);
    for (std::size_t c = 0; c < channels; ++c) ds.channel_names[c] = "ch" + std::to_string(c);
    ds.calendar.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        ds.calendar.push_back(
            indexnet::index_proxy_features(static_cast<std::int64_t>(r), tau_minutes));
    }
    ds.has_date_column = false;
    ds.freq_minutes = tau_minutes;
    ds.splits = indexnet::resolve_splits("auto", rows);
    return ds;
}

// A clean learnable series: one daily sine per channel plus light noise.
inline indexnet::TimeSeriesDataset make_sine_dataset(std::size_t rows, std::size_t channels,
                                                     std::uint64_t seed = 7,
                                                     double noise = 0.05) {
    indexnet::TimeSeriesDataset ds = make_proxy_dataset(rows, channels);
    indexnet::Rng rng(seed, 42);
    for (std::size_t r = 0; r < rows; ++r) {
        const double phase = 2.0 * M_PI * static_cast<double>(r % 24) / 24.0;
        for (std::size_t c = 0; c < channels; ++c) {
            ds.values(r, c) = std::sin(phase) + noise * (2.0 * rng.next_double() - 1.0);
        }
    }
    return ds;
}

// Hourly dataset engineered so that the timestamp and channel embeddings
// carry information the raw window provably cannot:
//
//   value = noise everywhere EXCEPT on day 3 of each week, whose level is
//   1 + c_n per channel (c_n spread across [-c_span/2, +c_span/2]).
//
// A 96-hour lookback window that never touches day 3 (starts on day 4 or 5
// at any hour, or day 6 at midnight) is indistinguishable from every other
// such window, yet their continuations differ: some targets stay flat,
// others run into the day-3 level. Resolving which needs the day-of-week
// and hour embeddings; predicting the level itself needs the channel
// embedding, because day 3 is never visible inside those windows.
inline indexnet::TimeSeriesDataset make_alias_dataset(std::size_t rows, std::size_t channels,
                                                      std::uint64_t seed,
                                                      double noise = 0.15,
                                                      double c_span = 1.6) {
    indexnet::TimeSeriesDataset ds = make_proxy_dataset(rows, channels);
    indexnet::Rng rng(seed, 43);
    for (std::size_t r = 0; r < rows; ++r) {
        const int dow = ds.calendar[r].day_of_week;
        for (std::size_t c = 0; c < channels; ++c) {
            double level = 0.0;
            if (dow == 3) {
                const double c_n =
                    channels == 1 ? 0.0
                                  : c_span * (static_cast<double>(c) /
                                                  static_cast<double>(channels - 1) -
                                              0.5);
                level = 1.0 + c_n;
            }
            ds.values(r, c) = level + noise * (2.0 * rng.next_double() - 1.0);
        }
    }
    return ds;
}

// Unique scratch directory under the system temp root.
inline std::filesystem::path make_temp_dir(const std::string& tag) {
    static int counter = 0;
    const auto base = std::filesystem::temp_directory_path() /
                      (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(base);
    return base;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// A small hourly CSV with a date column and deterministic values. Keep
// rows below 744 so the dates stay inside July 2016.
inline std::string hourly_csv(std::size_t rows, std::size_t channels) {
    std::string text = "date";
    for (std::size_t c = 0; c < channels; ++c) text += ",v" + std::to_string(c);
    text += "\n";
    for (std::size_t r = 0; r < rows; ++r) {
        char stamp[32];
        std::snprintf(stamp, sizeof(stamp), "2016-07-%02zu %02zu:00:00", 1 + r / 24, r % 24);
        text += stamp;
        for (std::size_t c = 0; c < channels; ++c) {
            text += "," + std::to_string(0.25 * static_cast<double>(r) +
                                         static_cast<double>(c));
        }
        text += "\n";
    }
    return text;
}

} // namespace testsupport
