#pragma once

#include <string>

#include "amglab/sparse.hpp"

namespace amglab {

/// Writes coordinate-format Matrix Market ("real general", 1-based indices).
void write_matrix_market(const SparseMatrix& A, const std::string& path);

/// Reads coordinate Matrix Market: real, general or symmetric
/// (symmetric files are expanded to full storage). Pattern/complex kinds are rejected.
SparseMatrix read_matrix_market(const std::string& path);

}  // namespace amglab
