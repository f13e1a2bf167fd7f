#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "indexnet/calendar.hpp"
#include "indexnet/linalg.hpp"

namespace indexnet {

// Chronological train/val/test borders as row indices:
// rows [0, train_end) train, [train_end, val_end) val, [val_end, data_end) test.
struct SplitBorders {
    std::size_t train_end = 0;
    std::size_t val_end = 0;
    std::size_t data_end = 0;
};

// One multivariate series: `rows()` time steps by `channels()` variables,
// with one CalendarFields per step. When the CSV has no date column the
// calendar is synthesized from row indices (month fields flagged absent).
struct TimeSeriesDataset {
    DenseMatrix values; // rows x channels
    std::vector<std::string> channel_names;
    std::vector<CalendarFields> calendar;
    bool has_date_column = false;
    int freq_minutes = 0;
    SplitBorders splits;

    std::size_t rows() const { return values.rows; }
    std::size_t channels() const { return values.cols; }
};

// Loads a headered CSV. A first column named "date" (case-insensitive) is
// parsed as timestamps; every other column must be numeric. Malformed input
// raises DataError naming the file line. With a date column the stride is
// inferred and must be constant; freq_minutes, if nonzero, must agree with
// it. Without one, freq_minutes must be given so calendar fields can be
// synthesized from row indices. `splits` is left unset; see resolve_splits.
TimeSeriesDataset load_csv(const std::string& path, int freq_minutes = 0);

// Named splits reproduce the standard borders for the ETT series
// (etth1/etth2: 8640/11520 with the data capped at 14400 rows;
// ettm1/ettm2: 34560/46080 capped at 57600). Any other name falls back to
// 70% train / 20% test with validation taking the remainder. Explicit
// *_override values (nonzero) win over both and uncap the data.
SplitBorders resolve_splits(const std::string& split_name, std::size_t rows,
                            std::size_t train_end_override = 0,
                            std::size_t val_end_override = 0);

// Per-channel mean and population standard deviation over the training
// rows. A standard deviation below 1e-8 is clamped to 1e-8 with a warning
// naming the channel, so constant channels cannot divide by zero.
struct StandardizerStats {
    std::vector<double> mean;
    std::vector<double> std_dev;

    static StandardizerStats fit(const TimeSeriesDataset& ds, std::size_t train_end);
};

// Channel-major standardized copy: out[c * rows + r] = (x - mean[c]) / std[c].
// Windows over one channel are then contiguous slices.
std::vector<double> standardized_channel_major(const TimeSeriesDataset& ds,
                                               const StandardizerStats& stats);

enum class Split { train, val, test };

// One forecasting sample position: input rows [start, start+L), target rows
// [start+L, start+L+T). Values are read out of the standardized buffer by
// these indices, so slices can never drift from the dataset. start_calendar
// keys the timestamp-embedding retrieval for the whole window.
struct Window {
    std::size_t start = 0;
    CalendarFields start_calendar;
};

// Stride-1 window enumeration against ds.splits. Training windows lie fully
// inside the train rows (count train_end - L - T + 1); validation and test
// windows must have their target inside the split but may reach back across
// the border for input context (count split_len - T + 1). A split too short
// to hold any window yields an empty sequence with a warning.
std::vector<Window> make_windows(const TimeSeriesDataset& ds, Split split,
                                 std::size_t lookback, std::size_t horizon);

// FNV-1a 64-bit over the file's raw bytes; used to fingerprint inputs in
// run manifests. DataError if the file cannot be read.
std::uint64_t fnv1a64_file(const std::string& path);

} // namespace indexnet
