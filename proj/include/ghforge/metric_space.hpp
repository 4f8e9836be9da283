#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ghforge/error.hpp"

namespace ghforge {

using Matrix = std::vector<std::vector<double>>;

/// Largest |X|+|Y| accepted by the exhaustive correspondence searches.
inline constexpr std::size_t kEnumerationGuard = 12;

/// A finite metric space: labelled points and a validated distance matrix.
///
/// The payload is immutable and shared, so copies are cheap and instances
/// can be passed around freely between threads. Indices are the internal
/// currency; labels are only carried for I/O.
class FiniteMetricSpace {
 public:
  /// Validates `matrix` against the metric axioms. Symmetry and the zero
  /// diagonal are checked exactly; the triangle inequality allows
  /// `triangle_tol` of slack.
  static FiniteMetricSpace from_matrix(std::vector<std::string> labels, const Matrix& matrix,
                                       double triangle_tol = 1e-9);
  /// Same, with labels "0", "1", ...
  static FiniteMetricSpace from_matrix(const Matrix& matrix, double triangle_tol = 1e-9);

  std::size_t size() const noexcept { return data_->n; }
  double distance(std::size_t i, std::size_t j) const noexcept { return data_->dist[i * data_->n + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return distance(i, j); }

  const std::vector<std::string>& labels() const noexcept { return data_->labels; }
  const std::string& label(std::size_t i) const { return data_->labels.at(i); }
  std::optional<std::size_t> index_of(std::string_view label) const;

  double diameter() const noexcept;
  Matrix matrix() const;

  /// The restriction of the metric to `indices` (kept in the given order).
  FiniteMetricSpace subspace(std::span<const std::size_t> indices) const;
  /// Every distance multiplied by `factor` (> 0).
  FiniteMetricSpace scaled(double factor) const;

  friend bool operator==(const FiniteMetricSpace& a, const FiniteMetricSpace& b);

 private:
  struct Data {
    std::vector<std::string> labels;
    std::size_t n = 0;
    std::vector<double> dist;
  };
  explicit FiniteMetricSpace(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

  std::shared_ptr<const Data> data_;
};

/// validate_metric: the matrix-only entry point.
FiniteMetricSpace validate_metric(const Matrix& matrix, double triangle_tol = 1e-9);

struct PointedSpace {
  PointedSpace(FiniteMetricSpace space, std::size_t origin);

  FiniteMetricSpace space;
  std::size_t origin;
};

/// A distance-preserving injective index map source -> target.
class IsometricEmbedding {
 public:
  /// Throws InvalidArgument unless `map` is injective and preserves every
  /// distance exactly.
  IsometricEmbedding(FiniteMetricSpace source, FiniteMetricSpace target, std::vector<std::size_t> map);

  static IsometricEmbedding identity(const FiniteMetricSpace& space);
  /// The inclusion of `host.subspace(indices)` into `host`.
  static IsometricEmbedding inclusion(const FiniteMetricSpace& host, std::vector<std::size_t> indices);

  const FiniteMetricSpace& source() const noexcept { return source_; }
  const FiniteMetricSpace& target() const noexcept { return target_; }
  const std::vector<std::size_t>& map() const noexcept { return map_; }
  std::size_t operator()(std::size_t i) const { return map_.at(i); }

  /// Index in the source of target point `j`, if `j` is in the image.
  std::optional<std::size_t> preimage(std::size_t j) const;
  bool is_bijective() const noexcept { return source_.size() == target_.size(); }

 private:
  FiniteMetricSpace source_;
  FiniteMetricSpace target_;
  std::vector<std::size_t> map_;
  std::vector<std::ptrdiff_t> inverse_;
};

/// `second` after `first`: x -> second(first(x)).
IsometricEmbedding compose(const IsometricEmbedding& first, const IsometricEmbedding& second);

struct Ball {
  FiniteMetricSpace space;
  IsometricEmbedding inclusion;
  std::size_t origin;  // index of the centre inside `space`
};

/// The closed ball {y : d(origin, y) <= radius}, compared exactly.
Ball closed_ball(const PointedSpace& pointed, double radius);

/// A relation between two spaces whose projections cover both sides.
class Correspondence {
 public:
  /// Throws InvalidArgument on an out-of-range pair or an uncovered point.
  Correspondence(FiniteMetricSpace left, FiniteMetricSpace right,
                 std::vector<std::pair<std::size_t, std::size_t>> pairs);

  static Correspondence graph(const IsometricEmbedding& bijection);

  const FiniteMetricSpace& left() const noexcept { return left_; }
  const FiniteMetricSpace& right() const noexcept { return right_; }
  /// Sorted, without duplicates.
  const std::vector<std::pair<std::size_t, std::size_t>>& pairs() const noexcept { return pairs_; }
  bool contains(std::size_t i, std::size_t j) const noexcept { return member_[i * right_.size() + j] != 0; }

  friend bool operator==(const Correspondence& a, const Correspondence& b) { return a.pairs_ == b.pairs_; }

 private:
  FiniteMetricSpace left_;
  FiniteMetricSpace right_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  std::vector<char> member_;
};

/// sup over related pairs (x,y), (x',y') of |d(x,x') - d(y,y')|.
double distortion(const Correspondence& relation);

/// Calls `visit` once for every correspondence between `left` and `right`.
/// Throws TooLarge when |left| + |right| exceeds `guard`.
void for_each_correspondence(const FiniteMetricSpace& left, const FiniteMetricSpace& right,
                             const std::function<void(const Correspondence&)>& visit,
                             std::size_t guard = kEnumerationGuard);

std::vector<Correspondence> enumerate_correspondences(const FiniteMetricSpace& left,
                                                      const FiniteMetricSpace& right,
                                                      std::size_t guard = kEnumerationGuard);

/// A distance-preserving bijection a -> b, if one exists.
std::optional<IsometricEmbedding> find_isomorphism(const FiniteMetricSpace& a, const FiniteMetricSpace& b,
                                                   std::size_t guard = kEnumerationGuard);

/// Every distance-preserving bijection a -> b, in lexicographic order of the
/// index map.
void for_each_isometry(const FiniteMetricSpace& a, const FiniteMetricSpace& b,
                       const std::function<bool(const std::vector<std::size_t>&)>& visit);

}  // namespace ghforge
