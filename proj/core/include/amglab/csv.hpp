#pragma once

#include <string>
#include <vector>

#include "amglab/dense.hpp"

namespace amglab {

/// Deterministic CSV writer: header row + value rows, %.12e for reals.
/// Byte-identical output for identical input (no locale, no timestamps).
class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(const std::vector<std::string>& cells);
  /// Formats a double as %.12e (the one number format used in CSV output).
  static std::string num(double v);

  const std::string& content() const { return body_; }
  void write(const std::string& path) const;

private:
  std::size_t ncols_;
  std::string body_;
};

/// Dense matrix as CSV (no header), %.17g entries.
void write_dense_csv(const DenseMatrix& A, const std::string& path);

}  // namespace amglab
