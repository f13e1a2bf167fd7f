#include "indexnet/pca.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "indexnet/errors.hpp"

namespace indexnet {

void jacobi_eigh(const DenseMatrix& sym, std::vector<double>& eigenvalues,
                 DenseMatrix& eigenvectors) {
    const std::size_t n = sym.rows;
    if (sym.cols != n) throw ShapeError("jacobi_eigh: matrix is not square");
    DenseMatrix a = sym;
    DenseMatrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    auto off_norm = [&a, n]() {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) s += a(p, q) * a(p, q);
        }
        return s;
    };
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale += a(i, i) * a(i, i);
    const double tol = 1e-24 * std::max(scale, 1e-300);

    for (int sweep = 0; sweep < 100 && off_norm() > tol; ++sweep) {
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a(p, i), aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i);
    std::stable_sort(idx.begin(), idx.end(),
                     [&diag](std::size_t x, std::size_t y) { return diag[x] > diag[y]; });

    eigenvalues.resize(n);
    eigenvectors = DenseMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        eigenvalues[j] = diag[idx[j]];
        for (std::size_t i = 0; i < n; ++i) eigenvectors(i, j) = v(i, idx[j]);
    }
}

ProjectionResult pca_project(const DenseMatrix& rows, std::size_t k) {
    const std::size_t r = rows.rows;
    const std::size_t d = rows.cols;
    if (r < 2) throw ShapeError("pca_project needs at least 2 rows, got " + std::to_string(r));
    if (d < k) {
        throw ShapeError("pca_project: dimension " + std::to_string(d) +
                         " is smaller than k = " + std::to_string(k));
    }

    DenseMatrix centered(r, d);
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < d; ++j) mean[j] += rows(i, j);
    }
    for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(r);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < d; ++j) centered(i, j) = rows(i, j) - mean[j];
    }

    DenseMatrix cov(d, d);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t p = 0; p < d; ++p) {
            const double cp = centered(i, p);
            if (cp == 0.0) continue;
            for (std::size_t q = p; q < d; ++q) cov(p, q) += cp * centered(i, q);
        }
    }
    const double inv = 1.0 / static_cast<double>(r - 1);
    for (std::size_t p = 0; p < d; ++p) {
        for (std::size_t q = p; q < d; ++q) {
            cov(p, q) *= inv;
            cov(q, p) = cov(p, q);
        }
    }

    std::vector<double> eigenvalues;
    DenseMatrix v;
    jacobi_eigh(cov, eigenvalues, v);

    double total = 0.0;
    for (double& e : eigenvalues) {
        if (e < 0.0) e = 0.0; // numerical fuzz on rank-deficient input
        total += e;
    }
    const double rank_tol = total > 0.0 ? 1e-12 * eigenvalues[0] : 0.0;

    ProjectionResult res;
    res.coords = DenseMatrix(r, k);
    res.explained_variance_ratio.assign(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        if (total <= 0.0 || eigenvalues[j] <= rank_tol) continue; // below rank: zeros
        res.explained_variance_ratio[j] = eigenvalues[j] / total;
        // Sign convention: first nonzero coordinate of the component >= 0.
        double sign = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            if (std::abs(v(i, j)) > 1e-12) {
                sign = v(i, j) < 0.0 ? -1.0 : 1.0;
                break;
            }
        }
        for (std::size_t i = 0; i < r; ++i) {
            double acc = 0.0;
            for (std::size_t p = 0; p < d; ++p) acc += centered(i, p) * v(p, j);
            res.coords(i, j) = sign * acc;
        }
    }
    return res;
}

namespace {

nlohmann::ordered_json table_document(const std::string& name, const DenseMatrix& values,
                                      const std::vector<long>& labels) {
    ProjectionResult proj = pca_project(values, 3);
    nlohmann::ordered_json doc;
    doc["table"] = name;
    doc["dim"] = values.cols;
    doc["labels"] = labels;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < values.rows; ++i) {
        rows.push_back(std::vector<double>(values.row_ptr(i), values.row_ptr(i) + values.cols));
    }
    doc["rows"] = std::move(rows);
    nlohmann::ordered_json coords = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < proj.coords.rows; ++i) {
        coords.push_back(std::vector<double>{proj.coords(i, 0), proj.coords(i, 1),
                                             proj.coords(i, 2)});
    }
    doc["pca"] = {{"coords", std::move(coords)}, {"evr", proj.explained_variance_ratio}};
    return doc;
}

std::vector<long> iota_labels(std::size_t n, long first) {
    std::vector<long> out(n);
    std::iota(out.begin(), out.end(), first);
    return out;
}

} // namespace

std::vector<std::string> export_embeddings(const TimestampTables& tables,
                                           const ChannelTable& channels, bool te_enabled,
                                           bool ce_enabled, const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create output directory '" + out_dir + "': " + ec.message());

    std::vector<std::string> written;
    auto write_doc = [&](const std::string& name, const DenseMatrix& values,
                         const std::vector<long>& labels) {
        const std::string path = (std::filesystem::path(out_dir) / (name + ".json")).string();
        std::ofstream out(path);
        if (!out) throw DataError("cannot write embedding export '" + path + "'");
        out << table_document(name, values, labels).dump(2) << "\n";
        if (!out) throw DataError("write failed for embedding export '" + path + "'");
        written.push_back(path);
    };

    if (te_enabled && tables.groups.week_level) {
        if (!tables.minute.empty()) {
            write_doc("minute", tables.minute.values, iota_labels(tables.minute.rows(), 0));
        }
        write_doc("hour", tables.hour.values, iota_labels(24, 0));
        write_doc("dow", tables.dow.values, iota_labels(7, 0));
    }
    if (te_enabled && tables.groups.month_level) {
        write_doc("dom", tables.dom.values, iota_labels(31, 1));
        write_doc("month", tables.month.values, iota_labels(12, 1));
    }
    if (ce_enabled) {
        write_doc("channel", channels.identity.values,
                  iota_labels(channels.identity.rows(), 1));
    }
    return written;
}

std::vector<std::string> export_embeddings(const Model& model, const std::string& out_dir) {
    return export_embeddings(model.tables, model.channels, model.params.dims.te_enabled,
                             model.params.dims.ce_enabled, out_dir);
}

} // namespace indexnet
