#include "amglab/matrix_market.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "amglab/errors.hpp"

namespace amglab {

void write_matrix_market(const SparseMatrix& A, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("write_matrix_market: cannot open " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.nrows << " " << A.ncols << " " << A.nnz() << "\n";
  char buf[64];
  for (index_t i = 0; i < A.nrows; ++i) {
    for (index_t k = A.row_offsets[static_cast<std::size_t>(i)];
         k < A.row_offsets[static_cast<std::size_t>(i) + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%lld %lld %.17g\n",
                    static_cast<long long>(i + 1),
                    static_cast<long long>(A.col_indices[static_cast<std::size_t>(k)] + 1),
                    A.values[static_cast<std::size_t>(k)]);
      out << buf;
    }
  }
  if (!out) throw ConfigError("write_matrix_market: write failed for " + path);
}

SparseMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("read_matrix_market: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("read_matrix_market: empty file " + path);
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  for (auto* s : {&object, &format, &field, &symmetry})
    for (char& c : *s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (banner != "%%MatrixMarket" || object != "matrix" || format != "coordinate")
    throw ConfigError("read_matrix_market: unsupported header in " + path);
  if (field != "real")
    throw ConfigError("read_matrix_market: only real matrices are supported");
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general")
    throw ConfigError("read_matrix_market: unsupported symmetry '" + symmetry + "'");

  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  index_t nrows = 0, ncols = 0, nnz = 0;
  {
    std::istringstream sizes(line);
    if (!(sizes >> nrows >> ncols >> nnz))
      throw ConfigError("read_matrix_market: malformed size line in " + path);
  }
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(symmetric ? 2 * nnz : nnz));
  for (index_t k = 0; k < nnz; ++k) {
    index_t i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v))
      throw ConfigError("read_matrix_market: truncated entry list in " + path);
    trips.push_back({i - 1, j - 1, v});
    if (symmetric && i != j) trips.push_back({j - 1, i - 1, v});
  }
  return from_triplets(nrows, ncols, trips);
}

}  // namespace amglab
