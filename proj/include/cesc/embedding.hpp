#pragma once

#include "cesc/common.hpp"

#include <filesystem>
#include <string>

namespace cesc {

/// Point coordinates whose squared Euclidean row distances are (approximate)
/// commute times.
struct Embedding {
  enum class Kind { exact, approximate };

  DenseMatrix coords;  // n x k, one row per node
  Kind kind = Kind::approximate;
  double source_volume = 0.0;

  Index size() const noexcept { return static_cast<Index>(coords.rows()); }
  Index dimension() const noexcept { return static_cast<Index>(coords.cols()); }
};

/// Squared Euclidean distance between rows i and j. Throws std::out_of_range.
double approx_commute(const Embedding& e, Index i, Index j);

/// One row per node, one column per coordinate, full double precision.
std::string format_embedding_csv(const Embedding& e);
void write_embedding_csv(const std::filesystem::path& path, const Embedding& e);

}  // namespace cesc
