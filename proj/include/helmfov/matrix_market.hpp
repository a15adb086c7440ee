#pragma once

#include <filesystem>
#include <iosfwd>

#include "helmfov/sparse.hpp"

namespace helmfov {

/// Writes `%%MatrixMarket matrix coordinate complex general`, 1-based indices,
/// entries in row-major order, values in shortest round-trip decimal form.
void write_matrix_market(std::ostream& out, const SparseComplexMatrix& a);
void export_matrixmarket(const SparseComplexMatrix& a, const std::filesystem::path& path);
void export_matrixmarket(const SparseRealMatrix& a, const std::filesystem::path& path);

/// Reads a coordinate MatrixMarket file (real, integer or complex; general or
/// symmetric/hermitian storage).
SparseComplexMatrix read_matrix_market(std::istream& in);
SparseComplexMatrix import_matrixmarket(const std::filesystem::path& path);

}  // namespace helmfov
