#include "cesc/dataset.hpp"

#include "cesc/kdtree.hpp"
#include "cesc/random.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace cesc {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Calls fn(line, line_number) for every line, numbering from 1.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = text.substr(0, nl);
    ++line_no;
    fn(line, line_no);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

double parse_real(std::string_view cell, std::size_t line_no) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
    throw ParseError("non-numeric cell '" + std::string(cell) + "'", line_no);
  if (!std::isfinite(value)) throw ParseError("non-finite value '" + std::string(cell) + "'", line_no);
  return value;
}

int parse_label(std::string_view cell, std::size_t line_no) {
  const double v = parse_real(cell, line_no);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw ParseError("label '" + std::string(trim(cell)) + "' is not an integer", line_no);
  return static_cast<int>(v);
}

template <typename T>
bool parse_integer(std::string_view token, T& out) {
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

}  // namespace

void FeatureMatrix::validate() const {
  if (values.rows() < 1 || values.cols() < 1) throw Error("feature matrix must be at least 1 x 1");
  if (!values.allFinite()) throw Error("feature matrix contains non-finite values");
  if (labels && labels->size() != rows()) throw Error("label vector length differs from row count");
}

FeatureMatrix parse_features(std::string_view text, bool has_header, std::optional<Index> label_column) {
  std::vector<double> cells;
  std::vector<int> labels;
  Index width = 0;
  Index rows = 0;
  bool header_pending = has_header;

  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (trim(line).empty()) return;
    if (header_pending) {
      header_pending = false;
      return;
    }
    std::vector<std::string_view> fields;
    for (std::size_t start = 0;;) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      width = fields.size();
      if (label_column && *label_column >= width)
        throw ParseError("label column " + std::to_string(*label_column) + " out of range", line_no);
      if (label_column && width == 1) throw ParseError("no feature columns besides the label", line_no);
    } else if (fields.size() != width) {
      throw ParseError("malformed row: expected " + std::to_string(width) + " columns, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    for (Index c = 0; c < fields.size(); ++c) {
      if (label_column && c == *label_column)
        labels.push_back(parse_label(fields[c], line_no));
      else
        cells.push_back(parse_real(fields[c], line_no));
    }
    ++rows;
  });

  if (rows == 0) throw ParseError("empty file", 0);
  const Index d = width - (label_column ? 1 : 0);
  FeatureMatrix fm;
  fm.values = Eigen::Map<DenseMatrix>(cells.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
  if (label_column) fm.labels = std::move(labels);
  return fm;
}

FeatureMatrix load_features(const std::filesystem::path& path, bool has_header, std::optional<Index> label_column) {
  return parse_features(read_file(path), has_header, label_column);
}

EdgeList parse_edge_list(std::string_view text) {
  EdgeList out;
  std::unordered_map<std::uint64_t, Index> dense;
  std::unordered_map<std::uint64_t, std::size_t> seen_pairs;

  auto intern = [&](std::uint64_t ext) {
    auto [it, inserted] = dense.try_emplace(ext, out.external_ids.size());
    if (inserted) out.external_ids.push_back(ext);
    return it->second;
  };

  // Undirected pair key on dense ids; dense ids stay below 2^32 for any file we can hold.
  auto pair_key = [](Index a, Index b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
  };

  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tokens = split_whitespace(line);
    if (tokens.empty()) return;
    if (tokens.size() != 2 && tokens.size() != 3)
      throw ParseError("expected 'u v [w]'", line_no);
    std::uint64_t u_ext = 0;
    std::uint64_t v_ext = 0;
    if (!parse_integer(tokens[0], u_ext) || !parse_integer(tokens[1], v_ext))
      throw ParseError("node ids must be non-negative integers", line_no);
    double w = 1.0;
    if (tokens.size() == 3) {
      w = parse_real(tokens[2], line_no);
      if (w <= 0.0) throw ParseError("edge weight must be positive", line_no);
    }
    if (u_ext == v_ext) throw ParseError("self-loop on node " + std::to_string(u_ext), line_no);
    const Index u = intern(u_ext);
    const Index v = intern(v_ext);
    if (!seen_pairs.try_emplace(pair_key(u, v), out.edges.size()).second) {
      ++out.duplicates_dropped;
      return;
    }
    out.edges.push_back({u, v, w});
  });
  out.node_count = out.external_ids.size();
  return out;
}

EdgeList load_edge_list(const std::filesystem::path& path) { return parse_edge_list(read_file(path)); }

std::string format_edge_list(const EdgeList& edges) {
  std::string out;
  char buf[64];
  for (const auto& e : edges.edges) {
    const auto ext = [&](Index i) { return edges.external_ids.empty() ? static_cast<std::uint64_t>(i) : edges.external_ids[i]; };
    out += std::to_string(ext(e.u));
    out += ' ';
    out += std::to_string(ext(e.v));
    out += ' ';
    const auto res = std::to_chars(buf, buf + sizeof buf, e.weight);
    out.append(buf, res.ptr);
    out += '\n';
  }
  return out;
}

void write_edge_list(const std::filesystem::path& path, const EdgeList& edges) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << format_edge_list(edges);
}

FeatureMatrix standardize(const FeatureMatrix& x) {
  x.validate();
  if (x.rows() < 2) throw Error("standardize needs at least two rows");
  FeatureMatrix out = x;
  const auto n = static_cast<double>(x.rows());
  for (Eigen::Index c = 0; c < out.values.cols(); ++c) {
    auto col = out.values.col(c);
    const double mean = col.sum() / n;
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / (n - 1.0));
    if (sd > 0.0) {
      col /= sd;
      // A second centering pass removes the rounding left by the first.
      col.array() -= col.sum() / n;
    } else {
      col.setZero();
    }
  }
  return out;
}

ShapeKind parse_shape_kind(std::string_view name) {
  if (name == "two_moons") return ShapeKind::two_moons;
  if (name == "blobs") return ShapeKind::blobs;
  if (name == "text_mask") return ShapeKind::text_mask;
  throw Error("unknown synthetic kind '" + std::string(name) + "'");
}

std::string_view to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::two_moons: return "two_moons";
    case ShapeKind::blobs: return "blobs";
    case ShapeKind::text_mask: return "text_mask";
  }
  return "?";
}

Index shape_cluster_count(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::two_moons: return 2;
    case ShapeKind::blobs: return 3;
    case ShapeKind::text_mask: return 10;
  }
  return 0;
}

double default_noise(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::two_moons: return 0.05;
    case ShapeKind::blobs: return 1.0;
    case ShapeKind::text_mask: return 0.01;
  }
  return 0.0;
}

FeatureMatrix synth_blobs(const DenseMatrix& centers, Index n, double stddev, std::uint64_t seed) {
  const auto k = static_cast<Index>(centers.rows());
  if (k == 0 || n < 2 * k) throw Error("synth_blobs: need n >= 2k");
  Rng rng(seed);
  FeatureMatrix fm;
  fm.values.resize(static_cast<Eigen::Index>(n), centers.cols());
  std::vector<int> labels(n);
  for (Index i = 0; i < n; ++i) {
    const Index c = i * k / n;  // contiguous, balanced label blocks
    labels[i] = static_cast<int>(c);
    for (Eigen::Index j = 0; j < centers.cols(); ++j)
      fm.values(static_cast<Eigen::Index>(i), j) = centers(static_cast<Eigen::Index>(c), j) + stddev * rng.normal();
  }
  fm.labels = std::move(labels);
  return fm;
}

namespace {

struct Point2 {
  double x;
  double y;
};

// One glyph: a list of polylines in glyph-local coordinates.
using Stroke = std::vector<Point2>;
struct Glyph {
  std::vector<Stroke> strokes;
};

Stroke arc(double cx, double cy, double r, double from_deg, double to_deg, int segments = 24) {
  Stroke s;
  for (int i = 0; i <= segments; ++i) {
    const double t = (from_deg + (to_deg - from_deg) * i / segments) * std::numbers::pi / 180.0;
    s.push_back({cx + r * std::cos(t), cy + r * std::sin(t)});
  }
  return s;
}

Stroke join(Stroke a, const Stroke& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// "DataMining" with the dots of the i's left out so every glyph is one piece.
std::vector<Glyph> text_glyphs() {
  const Glyph D{{join(join(Stroke{{0.0, 0.0}, {0.0, 1.0}, {0.3, 1.0}}, arc(0.3, 0.5, 0.5, 90, -90)),
                      Stroke{{0.0, 0.0}})}};
  const Glyph a{{arc(0.25, 0.27, 0.25, 0, 360), Stroke{{0.5, 0.0}, {0.5, 0.55}}}};
  const Glyph t{{Stroke{{0.1, 0.0}, {0.1, 0.85}}, Stroke{{0.0, 0.5}, {0.32, 0.5}}}};
  const Glyph M{{Stroke{{0.0, 0.0}, {0.0, 1.0}, {0.35, 0.45}, {0.7, 1.0}, {0.7, 0.0}}}};
  const Glyph i{{Stroke{{0.0, 0.0}, {0.0, 0.6}}}};
  const Glyph n{{join(join(Stroke{{0.0, 0.0}, {0.0, 0.55}}, arc(0.22, 0.33, 0.22, 180, 0)),
                      Stroke{{0.44, 0.0}})}};
  const Glyph g{{arc(0.25, 0.3, 0.25, 0, 360), join(Stroke{{0.5, 0.55}, {0.5, -0.1}}, arc(0.25, -0.1, 0.25, 0, -180))}};
  return {D, a, t, a, M, i, n, i, n, g};
}

double stroke_length(const Stroke& s) {
  double len = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) len += std::hypot(s[i].x - s[i - 1].x, s[i].y - s[i - 1].y);
  return len;
}

Point2 point_along(const Stroke& s, double dist) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double seg = std::hypot(s[i].x - s[i - 1].x, s[i].y - s[i - 1].y);
    if (dist <= seg || i + 1 == s.size()) {
      const double f = seg > 0.0 ? std::min(1.0, dist / seg) : 0.0;
      return {s[i - 1].x + f * (s[i].x - s[i - 1].x), s[i - 1].y + f * (s[i].y - s[i - 1].y)};
    }
    dist -= seg;
  }
  return s.back();
}

// Glyphs are bold filled pen strokes. Thin or long strokes are cheaper to cut
// in the middle than between letters, and spectral clustering then splits
// letters instead of separating them.
constexpr double kStrokeWidth = 0.4;

// Adjacent glyphs are placed so that they just touch under the 10-nearest-
// neighbor relation: some point has a point of the other glyph closer than
// kTouch times its own 10th neighbor within its glyph. That guarantees the
// k1 = 10 union graph is connected while bridging through only a few edges.
constexpr std::size_t kTouchNeighbors = 10;
constexpr double kTouch = 0.9;

// Distance from each point to its kTouchNeighbors-th neighbor in the same set.
std::vector<double> own_radius(const std::vector<Point2>& pts) {
  std::vector<double> radius(pts.size());
  std::vector<double> d(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) d[j] = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
    // d[i] = 0 is the point itself, so the k-th neighbor sits at rank k.
    const std::size_t rank = std::min(kTouchNeighbors, pts.size() - 1);
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(rank), d.end());
    radius[i] = d[rank];
  }
  return radius;
}

// min over points of (distance to the other set) / (own radius), with `b`
// shifted right by dx.
double touch_ratio(const std::vector<Point2>& a, const std::vector<double>& ra, const std::vector<Point2>& b,
                   const std::vector<double>& rb, double dx) {
  std::vector<double> to_b(a.size(), std::numeric_limits<double>::infinity());
  double ratio = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < b.size(); ++j) {
    double to_a = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = std::hypot(a[i].x - b[j].x - dx, a[i].y - b[j].y);
      to_a = std::min(to_a, d);
      to_b[i] = std::min(to_b[i], d);
    }
    ratio = std::min(ratio, to_a / rb[j]);
  }
  for (std::size_t i = 0; i < a.size(); ++i) ratio = std::min(ratio, to_b[i] / ra[i]);
  return ratio;
}

// Shift for `b` so that it touches `a` from the right: slide leftwards until
// the sets touch, then bisect.
double touching_offset(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  const auto ra = own_radius(a);
  const auto rb = own_radius(b);
  double a_right = -std::numeric_limits<double>::infinity();
  double b_left = std::numeric_limits<double>::infinity();
  double reach = 0.0;
  for (const auto& p : a) a_right = std::max(a_right, p.x);
  for (const auto& q : b) b_left = std::min(b_left, q.x);
  for (const double r : ra) reach = std::max(reach, r);
  for (const double r : rb) reach = std::max(reach, r);
  constexpr double step = 0.01;
  double hi = a_right - b_left + reach + step;
  while (touch_ratio(a, ra, b, rb, hi - step) >= kTouch) hi -= step;
  double lo = hi - step;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    (touch_ratio(a, ra, b, rb, mid) < kTouch ? lo : hi) = mid;
  }
  return lo;
}

FeatureMatrix synth_text(Index n, double noise, Rng& rng) {
  const auto glyphs = text_glyphs();
  const Index k = glyphs.size();
  if (n < 2 * k) throw Error("text_mask: need n >= 20");

  std::vector<double> lengths;
  for (const auto& g : glyphs) {
    double len = 0.0;
    for (const auto& s : g.strokes) len += stroke_length(s);
    lengths.push_back(len);
  }

  // Sample every glyph in local coordinates.
  std::vector<std::vector<Point2>> clouds(k);
  for (Index c = 0; c < k; ++c) {
    const auto& g = glyphs[c];
    // Equal point counts per glyph; the remainder goes to the first glyphs.
    const Index count = n / k + (c < n % k ? 1 : 0);
    for (Index p = 0; p < count; ++p) {
      // Stratified position along the concatenated strokes, then uniform in
      // the pen disk around it.
      double dist = (static_cast<double>(p) + rng.uniform()) / static_cast<double>(count) * lengths[c];
      std::size_t s = 0;
      while (s + 1 < g.strokes.size() && dist > stroke_length(g.strokes[s])) dist -= stroke_length(g.strokes[s++]);
      const Point2 q = point_along(g.strokes[s], dist);
      const double r = 0.5 * kStrokeWidth * std::sqrt(rng.uniform());
      const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
      clouds[c].push_back(
          {q.x + r * std::cos(phi) + noise * rng.normal(), q.y + r * std::sin(phi) + noise * rng.normal()});
    }
  }
  for (Index c = 1; c < k; ++c) {
    const double dx = touching_offset(clouds[c - 1], clouds[c]);
    for (auto& p : clouds[c]) p.x += dx;
  }

  FeatureMatrix fm;
  fm.values.resize(static_cast<Eigen::Index>(n), 2);
  std::vector<int> labels;
  labels.reserve(n);
  Eigen::Index row = 0;
  for (Index c = 0; c < k; ++c) {
    for (const auto& p : clouds[c]) {
      fm.values(row, 0) = p.x;
      fm.values(row, 1) = p.y;
      labels.push_back(static_cast<int>(c));
      ++row;
    }
  }
  fm.labels = std::move(labels);
  return fm;
}

// Grid-bucketed version of the touch test for large point sets: true when `b`
// raised by dy touches `a`.
bool touches_above(const std::vector<Point2>& a, const std::vector<double>& ra, const std::vector<Point2>& b,
                   const std::vector<double>& rb, double dy) {
  double reach = 0.0;
  for (const double r : ra) reach = std::max(reach, r);
  for (const double r : rb) reach = std::max(reach, r);
  const double cell = kTouch * reach;
  const auto cell_of = [cell](double v) { return static_cast<std::int64_t>(std::floor(v / cell)); };
  const auto key = [](std::int64_t cx, std::int64_t cy) { return cx * 1000003 + cy; };
  std::unordered_map<std::int64_t, std::vector<std::size_t>> grid;
  for (std::size_t i = 0; i < a.size(); ++i) grid[key(cell_of(a[i].x), cell_of(a[i].y))].push_back(i);
  for (std::size_t j = 0; j < b.size(); ++j) {
    const double x = b[j].x, y = b[j].y + dy;
    const std::int64_t cx = cell_of(x), cy = cell_of(y);
    for (std::int64_t ox = -1; ox <= 1; ++ox) {
      for (std::int64_t oy = -1; oy <= 1; ++oy) {
        const auto it = grid.find(key(cx + ox, cy + oy));
        if (it == grid.end()) continue;
        for (const std::size_t i : it->second) {
          const double d = std::hypot(a[i].x - x, a[i].y - y);
          if (d < kTouch * ra[i] || d < kTouch * rb[j]) return true;
        }
      }
    }
  }
  return false;
}

std::vector<double> own_radius_tree(const std::vector<Point2>& pts) {
  DenseMatrix m(static_cast<Eigen::Index>(pts.size()), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) m.row(static_cast<Eigen::Index>(i)) << pts[i].x, pts[i].y;
  const KdTree tree(m);
  const std::size_t rank = std::min(kTouchNeighbors, pts.size() - 1);
  std::vector<double> radius(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) radius[i] = std::sqrt(tree.nearest(i, rank).back().dist2);
  return radius;
}

// The lower moon starts level with the upper one and is raised until the two
// just touch, like adjacent text glyphs. With apart jitter the moons either
// split apart or grow thick bridges; this keeps a narrow neck at both tips.
FeatureMatrix synth_moons(Index n, double noise, Rng& rng) {
  if (n < 4) throw Error("two_moons: need n >= 4");
  const Index outer = (n + 1) / 2;
  const Index inner = n - outer;
  std::vector<Point2> upper, lower;
  for (Index i = 0; i < n; ++i) {
    const bool is_outer = i < outer;
    const Index j = is_outer ? i : i - outer;
    const Index count = is_outer ? outer : inner;
    const double t = std::numbers::pi * static_cast<double>(j) / static_cast<double>(count - 1);
    const double x = is_outer ? std::cos(t) : 1.0 - std::cos(t);
    const double y = is_outer ? std::sin(t) : -std::sin(t);
    (is_outer ? upper : lower).push_back({x + noise * rng.normal(), y + noise * rng.normal()});
  }

  const auto ru = own_radius_tree(upper);
  const auto rl = own_radius_tree(lower);
  constexpr double step = 0.02;
  // Bracket [apart, hit] around the first contact, then bisect.
  double apart = 0.0;
  double hit = step;
  if (touches_above(upper, ru, lower, rl, apart)) {
    while (touches_above(upper, ru, lower, rl, apart)) apart -= step;
    hit = apart + step;
  } else {
    while (!touches_above(upper, ru, lower, rl, hit)) hit += step;
    apart = hit - step;
  }
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (apart + hit);
    (touches_above(upper, ru, lower, rl, mid) ? hit : apart) = mid;
  }

  FeatureMatrix fm;
  fm.values.resize(static_cast<Eigen::Index>(n), 2);
  std::vector<int> labels(n);
  for (Index i = 0; i < outer; ++i) {
    fm.values.row(static_cast<Eigen::Index>(i)) << upper[i].x, upper[i].y;
    labels[i] = 0;
  }
  for (Index i = 0; i < inner; ++i) {
    fm.values.row(static_cast<Eigen::Index>(outer + i)) << lower[i].x, lower[i].y + hit;
    labels[outer + i] = 1;
  }
  fm.labels = std::move(labels);
  return fm;
}

}  // namespace

FeatureMatrix synth_shapes(ShapeKind kind, Index n, double noise, std::uint64_t seed) {
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw Error("synth_shapes: noise must be a finite value >= 0");
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(kind)));
  switch (kind) {
    case ShapeKind::two_moons: return synth_moons(n, noise, rng);
    case ShapeKind::text_mask: return synth_text(n, noise, rng);
    case ShapeKind::blobs: {
      DenseMatrix centers(3, 2);
      // Side 6: the tails overlap enough for a connected 10-NN graph.
      centers << 0.0, 0.0, 6.0, 0.0, 3.0, 5.196;
      return synth_blobs(centers, n, std::max(noise, 1e-12), rng.next());
    }
  }
  throw Error("unknown synthetic kind");
}

}  // namespace cesc
