#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "indexnet/forecaster.hpp"
#include "indexnet/linalg.hpp"

namespace indexnet {

// k-component PCA of a table's rows: coords is rows x k, and
// explained_variance_ratio holds each component's share of total variance
// (non-increasing, in [0,1]). Labels identify rows (slot/hour/day/channel
// numbers) and are attached by the export layer.
struct ProjectionResult {
    std::vector<std::string> labels;
    DenseMatrix coords;
    std::vector<double> explained_variance_ratio;
};

// Centers the rows, eigendecomposes the D x D covariance with cyclic
// Jacobi rotations, and projects onto the top-k components. Components
// beyond the matrix rank come back as zero coordinates with zero variance
// ratio. Sign convention: each component's first nonzero coordinate is
// non-negative. Requires at least 2 rows and D >= k (ShapeError otherwise).
ProjectionResult pca_project(const DenseMatrix& rows, std::size_t k = 3);

// Symmetric eigendecomposition helper used by pca_project: returns
// (eigenvalues desc, eigenvectors as columns of V in matching order).
void jacobi_eigh(const DenseMatrix& sym, std::vector<double>& eigenvalues,
                 DenseMatrix& eigenvectors);

// Writes one JSON document per active table into out_dir
// ({table, dim, labels, rows, pca: {coords, evr}}) and returns the paths
// written. Active means: week-level tables when the timestamp embedding is
// enabled (plus month-level when that group is on) and the channel table
// when the channel embedding is enabled. I/O failure raises DataError
// naming the path.
std::vector<std::string> export_embeddings(const TimestampTables& tables,
                                           const ChannelTable& channels, bool te_enabled,
                                           bool ce_enabled, const std::string& out_dir);

std::vector<std::string> export_embeddings(const Model& model, const std::string& out_dir);

} // namespace indexnet
