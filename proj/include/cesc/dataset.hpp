#pragma once

#include "cesc/common.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

namespace cesc {

/// n x d dense feature matrix with optional per-row class labels.
struct FeatureMatrix {
  DenseMatrix values;
  std::optional<std::vector<int>> labels;

  Index rows() const noexcept { return static_cast<Index>(values.rows()); }
  Index cols() const noexcept { return static_cast<Index>(values.cols()); }

  /// Throws cesc::Error when n or d is zero, a value is not finite, or the
  /// label vector has the wrong length.
  void validate() const;
};

struct WeightedEdge {
  Index u;
  Index v;
  double weight;

  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

/// Undirected weighted edge list over dense ids 0..node_count-1.
struct EdgeList {
  std::vector<WeightedEdge> edges;
  Index node_count = 0;
  /// external_ids[i] is the id node i carried in the source file.
  std::vector<std::uint64_t> external_ids;
  /// Number of duplicate undirected pairs dropped while loading.
  std::size_t duplicates_dropped = 0;
};

/// Reads a comma separated file. `label_column` selects a column holding
/// integer class ids; it is removed from the features.
FeatureMatrix load_features(const std::filesystem::path& path, bool has_header = false,
                            std::optional<Index> label_column = std::nullopt);

/// Same, from an in-memory buffer (used by load_features).
FeatureMatrix parse_features(std::string_view text, bool has_header = false,
                             std::optional<Index> label_column = std::nullopt);

/// Reads whitespace separated "u v [w]" lines; '#' starts a comment.
EdgeList load_edge_list(const std::filesystem::path& path);
EdgeList parse_edge_list(std::string_view text);

/// Writes "u v w" lines using the external ids, at full double precision.
void write_edge_list(const std::filesystem::path& path, const EdgeList& edges);
std::string format_edge_list(const EdgeList& edges);

/// Column-wise z-scores with the n-1 divisor. Zero-variance columns become 0.
FeatureMatrix standardize(const FeatureMatrix& x);

enum class ShapeKind { two_moons, blobs, text_mask };

ShapeKind parse_shape_kind(std::string_view name);
std::string_view to_string(ShapeKind kind);

/// Deterministic synthetic data with ground-truth labels.
///
/// - two_moons: two interleaved half circles, the lower one raised until
///   it just touches the upper one under the 10-nearest-neighbor relation
///   (2 clusters).
/// - blobs: three isotropic Gaussian blobs on an equilateral triangle of
///   side 6 (3 clusters).
/// - text_mask: the ten glyphs of "DataMining" drawn with a bold pen, equal
///   point counts per glyph, each glyph placed so that it just touches its
///   left neighbor under the 10-nearest-neighbor relation (10 clusters).
///
/// `noise` is the standard deviation of the Gaussian jitter.
FeatureMatrix synth_shapes(ShapeKind kind, Index n, double noise, std::uint64_t seed);

/// Cluster count implied by a generator kind.
Index shape_cluster_count(ShapeKind kind);

/// Jitter used when none is given: 0.05 for two_moons, 1.0 for blobs, 0.01
/// for text_mask.
double default_noise(ShapeKind kind);

/// Blobs with an explicit center list (used by tests and benchmarks).
FeatureMatrix synth_blobs(const DenseMatrix& centers, Index n, double stddev, std::uint64_t seed);

}  // namespace cesc
