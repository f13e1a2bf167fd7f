#pragma once

#include <cstddef>
#include <utility>

#include "indexnet/calendar.hpp"
#include "indexnet/linalg.hpp"

namespace indexnet {

// Which timestamp-feature groups participate. Week-level covers minute
// slot, hour of day, and day of week; month-level covers day of month and
// month of year. Month-level is opt-in: it only helps on series long
// enough to expose those cycles, and it requires real timestamps.
struct ActiveGroups {
    bool week_level = true;
    bool month_level = false;
};

// A lookup table and its gradient buffer, always the same shape.
struct EmbeddingTable {
    DenseMatrix values;
    DenseMatrix grads;

    EmbeddingTable() = default;
    EmbeddingTable(std::size_t rows, std::size_t cols)
        : values(rows, cols), grads(rows, cols) {}

    std::size_t rows() const { return values.rows; }
    bool empty() const { return values.size() == 0; }
    void zero_grads() { grads.fill(0.0); }
};

// The five timestamp tables. All are zero-initialized so an untrained model
// is timestamp-blind. With an hourly stride (tau = 60) there is exactly one
// minute slot and the minute table is omitted (k = 0, table empty).
struct TimestampTables {
    std::size_t t_dim = 0;
    int k = 0; // minute slots per hour = 60/tau; 0 when the table is omitted
    ActiveGroups groups;
    EmbeddingTable minute; // k x t_dim
    EmbeddingTable hour;   // 24 x t_dim
    EmbeddingTable dow;    // 7 x t_dim
    EmbeddingTable dom;    // 31 x t_dim
    EmbeddingTable month;  // 12 x t_dim
};

// Per-channel identity rows; channel n (1-based) reads row n-1.
struct ChannelTable {
    std::size_t c_dim = 0;
    EmbeddingTable identity; // n_channels x c_dim
};

// The table rows one retrieval touched; -1 marks "not read". Backward
// routes gradients to exactly these rows.
struct SourceIndices {
    int minute_row = -1;
    int hour_row = -1;
    int dow_row = -1;
    int dom_row = -1;
    int month_row = -1;
    int channel_row = -1;
};

// One retrieval's aggregates: e_w = minute + hour + dow rows (week group),
// e_m = dom + month rows (month group); inactive groups yield zeros.
struct IndexVectors {
    Vec e_w;
    Vec e_m;
    Vec e_identity;
    SourceIndices source_indices;
};

// Zero-filled tables of the exact shapes {60/tau, 24, 7, 31, 12} x t_dim
// and n_channels x c_dim. tau must divide 60 (ConfigError otherwise); at
// tau = 60 the minute table is omitted.
std::pair<TimestampTables, ChannelTable> build_tables(int tau_minutes, std::size_t t_dim,
                                                      std::size_t n_channels,
                                                      std::size_t c_dim,
                                                      ActiveGroups groups);

// The ablation alternative to zero init: fills every active table entry
// uniformly in [-1, 1), the usual unit-scale embedding-layer default. The
// scale is deliberately not fan-in-shrunk: a "random" table is supposed to
// inject O(1) vectors, unlike the inert zero default.
void randomize_tables(TimestampTables& tables, ChannelTable& channels, Rng& rng);

// e_w / e_m lookups for one calendar position. Out-of-range fields raise
// ShapeError; a month-level retrieval against index-synthesized calendar
// fields raises ConfigError("month features unavailable...").
void retrieve_timestamp(const TimestampTables& tables, const CalendarFields& cal,
                        Vec& e_w, Vec& e_m, SourceIndices& src);

// Row n-1 for channel n in 1..N; ShapeError outside that range.
Vec retrieve_channel(const ChannelTable& table, std::size_t n);

// Full retrieval for one (window start, channel) pair.
IndexVectors retrieve(const TimestampTables& tables, const ChannelTable& channels,
                      const CalendarFields& cal, std::size_t n);

// Adds grad_e_w into the grad buffers of the week-group rows recorded in
// src, grad_e_m into the month-group rows, and grad_identity into the
// channel row. Rows not in src are untouched. The sums in e_w/e_m make the
// chain rule route each gradient vector unchanged to every contributing row.
void embedding_backward(TimestampTables& tables, ChannelTable& channels,
                        const SourceIndices& src, const Vec& grad_e_w,
                        const Vec& grad_e_m, const Vec& grad_identity);

} // namespace indexnet
