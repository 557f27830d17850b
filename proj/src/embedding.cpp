#include "cesc/embedding.hpp"

#include <charconv>
#include <fstream>

namespace cesc {

double approx_commute(const Embedding& e, Index i, Index j) {
  if (i >= e.size() || j >= e.size()) throw std::out_of_range("approx_commute: node index out of range");
  if (i == j) return 0.0;
  return (e.coords.row(static_cast<Eigen::Index>(i)) - e.coords.row(static_cast<Eigen::Index>(j))).squaredNorm();
}

std::string format_embedding_csv(const Embedding& e) {
  std::string out;
  char buf[64];
  for (Eigen::Index r = 0; r < e.coords.rows(); ++r) {
    for (Eigen::Index c = 0; c < e.coords.cols(); ++c) {
      if (c) out += ',';
      const auto res = std::to_chars(buf, buf + sizeof buf, e.coords(r, c));
      out.append(buf, res.ptr);
    }
    out += '\n';
  }
  return out;
}

void write_embedding_csv(const std::filesystem::path& path, const Embedding& e) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << format_embedding_csv(e);
}

}  // namespace cesc
