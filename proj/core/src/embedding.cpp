#include "indexnet/embedding.hpp"

#include <cmath>
#include <string>

#include "indexnet/errors.hpp"

namespace indexnet {

std::pair<TimestampTables, ChannelTable> build_tables(int tau_minutes, std::size_t t_dim,
                                                      std::size_t n_channels,
                                                      std::size_t c_dim,
                                                      ActiveGroups groups) {
    if (tau_minutes <= 0 || 60 % tau_minutes != 0) {
        throw ConfigError("sampling interval must be a positive divisor of 60, got " +
                          std::to_string(tau_minutes));
    }
    if (t_dim < 1 || c_dim < 1 || n_channels < 1) {
        throw ConfigError("t_dim, c_dim, and the channel count must all be at least 1");
    }
    TimestampTables t;
    t.t_dim = t_dim;
    t.groups = groups;
    const int k = 60 / tau_minutes;
    if (k > 1) {
        t.k = k;
        t.minute = EmbeddingTable(static_cast<std::size_t>(k), t_dim);
    }
    t.hour = EmbeddingTable(24, t_dim);
    t.dow = EmbeddingTable(7, t_dim);
    t.dom = EmbeddingTable(31, t_dim);
    t.month = EmbeddingTable(12, t_dim);

    ChannelTable c;
    c.c_dim = c_dim;
    c.identity = EmbeddingTable(n_channels, c_dim);
    return {std::move(t), std::move(c)};
}

void randomize_tables(TimestampTables& tables, ChannelTable& channels, Rng& rng) {
    auto fill = [&rng](EmbeddingTable& t, std::size_t) {
        if (t.empty()) return;
        for (double& v : t.values.data) v = rng.uniform(-1.0, 1.0);
    };
    if (tables.groups.week_level) {
        fill(tables.minute, tables.t_dim);
        fill(tables.hour, tables.t_dim);
        fill(tables.dow, tables.t_dim);
    }
    if (tables.groups.month_level) {
        fill(tables.dom, tables.t_dim);
        fill(tables.month, tables.t_dim);
    }
    fill(channels.identity, channels.c_dim);
}

static void check_range(int value, int limit, const char* field) {
    if (value < 0 || value >= limit) {
        throw ShapeError(std::string("calendar field ") + field + " = " +
                         std::to_string(value) + " outside [0, " + std::to_string(limit) +
                         ")");
    }
}

void retrieve_timestamp(const TimestampTables& tables, const CalendarFields& cal,
                        Vec& e_w, Vec& e_m, SourceIndices& src) {
    const std::size_t d = tables.t_dim;
    e_w.assign(d, 0.0);
    e_m.assign(d, 0.0);
    src.minute_row = src.hour_row = src.dow_row = src.dom_row = src.month_row = -1;

    auto add_row = [d](Vec& dst, const EmbeddingTable& t, int row) {
        const double* r = t.values.row_ptr(static_cast<std::size_t>(row));
        for (std::size_t i = 0; i < d; ++i) dst[i] += r[i];
    };

    if (tables.groups.week_level) {
        if (!tables.minute.empty()) {
            check_range(cal.minute_idx, tables.k, "minute_idx");
            add_row(e_w, tables.minute, cal.minute_idx);
            src.minute_row = cal.minute_idx;
        }
        check_range(cal.hour, 24, "hour");
        check_range(cal.day_of_week, 7, "day_of_week");
        add_row(e_w, tables.hour, cal.hour);
        add_row(e_w, tables.dow, cal.day_of_week);
        src.hour_row = cal.hour;
        src.dow_row = cal.day_of_week;
    }
    if (tables.groups.month_level) {
        if (!cal.has_month_fields) {
            throw ConfigError(
                "month features unavailable: calendar fields were synthesized from row "
                "indices, so day-of-month and month are unknown");
        }
        check_range(cal.day_of_month, 31, "day_of_month");
        check_range(cal.month, 12, "month");
        add_row(e_m, tables.dom, cal.day_of_month);
        add_row(e_m, tables.month, cal.month);
        src.dom_row = cal.day_of_month;
        src.month_row = cal.month;
    }
}

Vec retrieve_channel(const ChannelTable& table, std::size_t n) {
    if (n < 1 || n > table.identity.rows()) {
        throw ShapeError("channel index " + std::to_string(n) + " outside 1.." +
                         std::to_string(table.identity.rows()));
    }
    const double* r = table.identity.values.row_ptr(n - 1);
    return Vec(r, r + table.c_dim);
}

IndexVectors retrieve(const TimestampTables& tables, const ChannelTable& channels,
                      const CalendarFields& cal, std::size_t n) {
    IndexVectors v;
    retrieve_timestamp(tables, cal, v.e_w, v.e_m, v.source_indices);
    v.e_identity = retrieve_channel(channels, n);
    v.source_indices.channel_row = static_cast<int>(n - 1);
    return v;
}

void embedding_backward(TimestampTables& tables, ChannelTable& channels,
                        const SourceIndices& src, const Vec& grad_e_w,
                        const Vec& grad_e_m, const Vec& grad_identity) {
    auto add_into = [](EmbeddingTable& t, int row, const Vec& g) {
        if (row < 0) return;
        double* r = t.grads.row_ptr(static_cast<std::size_t>(row));
        for (std::size_t i = 0; i < g.size(); ++i) r[i] += g[i];
    };
    if (!grad_e_w.empty()) {
        add_into(tables.minute, src.minute_row, grad_e_w);
        add_into(tables.hour, src.hour_row, grad_e_w);
        add_into(tables.dow, src.dow_row, grad_e_w);
    }
    if (!grad_e_m.empty()) {
        add_into(tables.dom, src.dom_row, grad_e_m);
        add_into(tables.month, src.month_row, grad_e_m);
    }
    if (!grad_identity.empty()) add_into(channels.identity, src.channel_row, grad_identity);
}

} // namespace indexnet
