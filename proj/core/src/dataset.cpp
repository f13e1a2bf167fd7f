#include "indexnet/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "indexnet/errors.hpp"
#include "indexnet/warnings.hpp"

namespace indexnet {

static std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

static std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

static std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

TimeSeriesDataset load_csv(const std::string& path, int freq_minutes) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file '" + path + "'");

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw DataError("dataset file '" + path + "' is empty");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header = split_csv_line(line);
    if (header.empty()) throw DataError("dataset file '" + path + "' has an empty header");

    TimeSeriesDataset ds;
    std::size_t first_value_col = 0;
    if (to_lower(header[0]) == "date" || to_lower(header[0]) == "timestamp") {
        ds.has_date_column = true;
        first_value_col = 1;
    }
    if (header.size() <= first_value_col) {
        throw DataError("dataset file '" + path + "' has no value columns");
    }
    const std::size_t channels = header.size() - first_value_col;
    ds.channel_names.assign(header.begin() + static_cast<std::ptrdiff_t>(first_value_col),
                            header.end());

    std::vector<double> flat;
    std::vector<std::string> stamps;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw DataError("line " + std::to_string(line_no) + " of '" + path + "' has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(header.size()));
        }
        if (ds.has_date_column) stamps.push_back(fields[0]);
        for (std::size_t c = first_value_col; c < fields.size(); ++c) {
            const std::string& cell = fields[c];
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(v)) {
                throw DataError("line " + std::to_string(line_no) + " of '" + path +
                                "': non-numeric value '" + cell + "' in column '" +
                                header[c] + "'");
            }
            flat.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) throw DataError("dataset file '" + path + "' has no data rows");

    ds.values = DenseMatrix(rows, channels);
    ds.values.data = std::move(flat);

    if (ds.has_date_column) {
        std::int64_t stride = freq_minutes;
        if (rows >= 2) {
            std::int64_t inferred = 0;
            try {
                inferred = minutes_from_epoch(stamps[1]) - minutes_from_epoch(stamps[0]);
            } catch (const DataError& e) {
                throw DataError("line 2-3 of '" + path + "': " + e.what());
            }
            if (inferred <= 0) {
                throw DataError("timestamps in '" + path + "' are not strictly increasing");
            }
            if (freq_minutes > 0 && inferred != freq_minutes) {
                throw DataError("dataset '" + path + "' has a " + std::to_string(inferred) +
                                "-minute stride but freq_minutes is " +
                                std::to_string(freq_minutes));
            }
            stride = inferred;
            std::int64_t prev = minutes_from_epoch(stamps[0]);
            for (std::size_t r = 1; r < rows; ++r) {
                const std::int64_t cur = minutes_from_epoch(stamps[r]);
                if (cur - prev != stride) {
                    throw DataError("irregular timestamp stride at data row " +
                                    std::to_string(r + 1) + " of '" + path +
                                    "' (expected " + std::to_string(stride) + " minutes)");
                }
                prev = cur;
            }
        }
        if (stride <= 0) {
            throw ConfigError("cannot determine the sampling interval of '" + path +
                              "'; pass freq_minutes");
        }
        ds.freq_minutes = static_cast<int>(stride);
        ds.calendar.reserve(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            try {
                ds.calendar.push_back(parse_timestamp(stamps[r], ds.freq_minutes));
            } catch (const DataError& e) {
                throw DataError("line " + std::to_string(r + 2) + " of '" + path + "': " +
                                e.what());
            }
        }
    } else {
        if (freq_minutes <= 0) {
            throw ConfigError("dataset '" + path +
                              "' has no date column; freq_minutes is required to "
                              "synthesize calendar fields");
        }
        ds.freq_minutes = freq_minutes;
        ds.calendar.reserve(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            ds.calendar.push_back(
                index_proxy_features(static_cast<std::int64_t>(r), freq_minutes));
        }
    }
    return ds;
}

SplitBorders resolve_splits(const std::string& split_name, std::size_t rows,
                            std::size_t train_end_override,
                            std::size_t val_end_override) {
    const std::string name = to_lower(split_name);
    SplitBorders b;
    if (name == "etth1" || name == "etth2") {
        b = {8640, 11520, std::min<std::size_t>(rows, 14400)};
    } else if (name == "ettm1" || name == "ettm2") {
        b = {34560, 46080, std::min<std::size_t>(rows, 57600)};
    } else {
        const std::size_t train_end = (rows * 7) / 10;
        const std::size_t test_len = (rows * 2) / 10;
        b = {train_end, rows - test_len, rows};
    }
    if (train_end_override != 0) b.train_end = train_end_override;
    if (val_end_override != 0) b.val_end = val_end_override;
    if (train_end_override != 0 || val_end_override != 0) b.data_end = rows;
    if (b.val_end >= rows) {
        throw DataError("split '" + split_name + "' expects more than " +
                        std::to_string(b.val_end) + " rows but the dataset has " +
                        std::to_string(rows));
    }
    if (!(b.train_end < b.val_end && b.val_end < b.data_end)) {
        throw ConfigError("split borders must satisfy train_end < val_end < data end (got " +
                          std::to_string(b.train_end) + ", " + std::to_string(b.val_end) +
                          ", " + std::to_string(b.data_end) + ")");
    }
    return b;
}

StandardizerStats StandardizerStats::fit(const TimeSeriesDataset& ds, std::size_t train_end) {
    if (train_end == 0 || train_end > ds.rows()) {
        throw DataError("standardizer fit range [0, " + std::to_string(train_end) +
                        ") is outside the dataset's " + std::to_string(ds.rows()) + " rows");
    }
    const std::size_t channels = ds.channels();
    StandardizerStats s;
    s.mean.assign(channels, 0.0);
    s.std_dev.assign(channels, 0.0);
    for (std::size_t r = 0; r < train_end; ++r) {
        for (std::size_t c = 0; c < channels; ++c) s.mean[c] += ds.values(r, c);
    }
    for (std::size_t c = 0; c < channels; ++c) s.mean[c] /= static_cast<double>(train_end);
    for (std::size_t r = 0; r < train_end; ++r) {
        for (std::size_t c = 0; c < channels; ++c) {
            const double d = ds.values(r, c) - s.mean[c];
            s.std_dev[c] += d * d;
        }
    }
    for (std::size_t c = 0; c < channels; ++c) {
        s.std_dev[c] = std::sqrt(s.std_dev[c] / static_cast<double>(train_end));
        if (s.std_dev[c] < 1e-8) {
            warn("channel '" + ds.channel_names[c] +
                 "' has near-zero training std; clamping to 1e-8");
            s.std_dev[c] = 1e-8;
        }
    }
    return s;
}

std::vector<double> standardized_channel_major(const TimeSeriesDataset& ds,
                                               const StandardizerStats& stats) {
    const std::size_t rows = ds.rows();
    const std::size_t channels = ds.channels();
    std::vector<double> out(rows * channels);
    for (std::size_t c = 0; c < channels; ++c) {
        const double mu = stats.mean[c];
        const double inv = 1.0 / stats.std_dev[c];
        double* dst = out.data() + c * rows;
        for (std::size_t r = 0; r < rows; ++r) dst[r] = (ds.values(r, c) - mu) * inv;
    }
    return out;
}

std::vector<Window> make_windows(const TimeSeriesDataset& ds, Split split,
                                 std::size_t lookback, std::size_t horizon) {
    if (lookback == 0 || horizon == 0) {
        throw ConfigError("lookback and horizon must be positive");
    }
    const SplitBorders& b = ds.splits;
    if (!(b.train_end < b.val_end && b.val_end <= b.data_end && b.data_end <= ds.rows())) {
        throw ConfigError("dataset split borders are unset or inconsistent");
    }
    std::vector<Window> out;
    auto emit = [&](std::size_t t) { out.push_back({t, ds.calendar[t]}); };

    if (split == Split::train) {
        if (b.train_end < lookback + horizon) {
            warn("train split (" + std::to_string(b.train_end) +
                 " rows) is shorter than lookback + horizon (" +
                 std::to_string(lookback + horizon) + "); no windows");
            return out;
        }
        for (std::size_t t = 0; t + lookback + horizon <= b.train_end; ++t) emit(t);
        return out;
    }

    const std::size_t begin = split == Split::val ? b.train_end : b.val_end;
    const std::size_t end = split == Split::val ? b.val_end : b.data_end;
    const char* label = split == Split::val ? "validation" : "test";
    if (end - begin < horizon) {
        warn(std::string(label) + " split (" + std::to_string(end - begin) +
             " rows) is shorter than the horizon (" + std::to_string(horizon) +
             "); no windows");
        return out;
    }
    // Target [t+L, t+L+T) inside the split; input may reach back for context.
    const std::size_t t_low = begin >= lookback ? begin - lookback : 0;
    for (std::size_t t = t_low; t + lookback + horizon <= end; ++t) {
        if (t + lookback >= begin) emit(t);
    }
    if (out.empty()) {
        warn(std::string(label) + " split yields no windows at lookback " +
             std::to_string(lookback) + ", horizon " + std::to_string(horizon));
    }
    return out;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file '" + path + "' for hashing");
    std::uint64_t h = 14695981039346656037ull;
    char buf[1 << 14];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    return h;
}

} // namespace indexnet
