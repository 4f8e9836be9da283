#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ghforge/base_distances.hpp"
#include "ghforge/metric_space.hpp"

namespace ghforge {

/// The metric space Xi in which marks live.
class MarkSpace {
 public:
  explicit MarkSpace(FiniteMetricSpace space) : space_(std::move(space)) {}
  /// One mark at distance 0 from itself; plain measures and subsets are
  /// 1-marked structures over this space.
  static MarkSpace trivial();

  const FiniteMetricSpace& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return space_.size(); }
  double distance(std::size_t a, std::size_t b) const noexcept { return space_(a, b); }

  friend bool operator==(const MarkSpace& a, const MarkSpace& b) { return a.space_ == b.space_; }

 private:
  FiniteMetricSpace space_;
};

class Structure;

struct PointStructure {
  std::size_t index;
  friend bool operator==(const PointStructure&, const PointStructure&) = default;
};

struct MeasureStructure {
  Weights weights;  // strictly positive
  friend bool operator==(const MeasureStructure&, const MeasureStructure&) = default;
};

struct SubsetStructure {
  std::vector<std::size_t> members;  // sorted, distinct, possibly empty
  friend bool operator==(const SubsetStructure&, const SubsetStructure&) = default;
};

/// A point of X^k x Xi.
struct MarkedPoint {
  std::vector<std::size_t> points;
  std::size_t mark;
  friend auto operator<=>(const MarkedPoint&, const MarkedPoint&) = default;
  friend bool operator==(const MarkedPoint&, const MarkedPoint&) = default;
};

struct MarkedAtom {
  MarkedPoint at;
  double weight;
  friend bool operator==(const MarkedAtom&, const MarkedAtom&) = default;
};

struct MarkedMeasureStructure {
  std::size_t k;
  MarkSpace marks;
  std::vector<MarkedAtom> atoms;  // sorted by position, merged, weights > 0
  friend bool operator==(const MarkedMeasureStructure&, const MarkedMeasureStructure&) = default;
};

struct MarkedSubsetStructure {
  std::size_t k;
  MarkSpace marks;
  std::vector<MarkedPoint> members;  // sorted, distinct
  friend bool operator==(const MarkedSubsetStructure&, const MarkedSubsetStructure&) = default;
};

/// A curve sampled on a strictly increasing time grid. A shorter curve whose
/// grid is a prefix of a longer one is read as stopped: it keeps its last
/// value for the remaining times. Trailing repeated samples are dropped, so
/// curves with the same held extension compare equal.
struct CurveStructure {
  std::vector<double> times;
  std::vector<std::size_t> values;
  friend bool operator==(const CurveStructure&, const CurveStructure&) = default;
};

enum class Combinator { Max, Weighted };

/// Several structures at once. `Max` compares them with the max of the
/// component distances; `Weighted` with max_i 2^-i (1 ^ d_i), i from 1.
struct TupleStructure {
  std::vector<Structure> children;
  Combinator combinator = Combinator::Max;
  friend bool operator==(const TupleStructure&, const TupleStructure&);
};

/// The empty state a point or curve falls into when truncation removes it.
struct AbsentStructure {
  friend bool operator==(const AbsentStructure&, const AbsentStructure&) = default;
};

enum class StructureKind { Point, Measure, Subset, MarkedMeasure, MarkedSubset, Curve, Tuple, Absent };

class Structure {
 public:
  using Variant = std::variant<PointStructure, MeasureStructure, SubsetStructure, MarkedMeasureStructure,
                               MarkedSubsetStructure, CurveStructure, TupleStructure, AbsentStructure>;

  // Factories validate intrinsic invariants and bring the value into
  // canonical form (sorted members, merged atoms, zero weights dropped).
  static Structure point(std::size_t index);
  static Structure measure(Weights weights);
  static Structure subset(std::vector<std::size_t> members);
  static Structure marked_measure(std::size_t k, MarkSpace marks, std::vector<MarkedAtom> atoms);
  static Structure marked_subset(std::size_t k, MarkSpace marks, std::vector<MarkedPoint> members);
  static Structure curve(std::vector<double> times, std::vector<std::size_t> values);
  static Structure tuple(std::vector<Structure> children, Combinator combinator = Combinator::Max);
  /// No additional structure: the empty max-tuple.
  static Structure none();
  static Structure absent();

  StructureKind kind() const noexcept { return static_cast<StructureKind>(value_.index()); }
  const Variant& value() const noexcept { return value_; }
  template <class T>
  const T& as() const {
    return std::get<T>(value_);
  }
  bool is_none() const noexcept;

  /// Throws HostMismatch unless every referenced index is < host_size.
  void validate_on(std::size_t host_size) const;

  friend bool operator==(const Structure& a, const Structure& b) { return a.value_ == b.value_; }

 private:
  explicit Structure(Variant v) : value_(std::move(v)) {}
  Variant value_;
};

std::string_view to_string(StructureKind kind);

/// Kind tree with k, mark-space size and curve grid length. Absent leaves
/// print as "absent".
std::string signature(const Structure& s);

/// True when `a` and `b` can be compared: same kinds (an absent leaf matches
/// a point or curve), same k and mark space, same tuple shape, and curve
/// grids that are prefixes of one another.
bool comparable(const Structure& a, const Structure& b);

/// A finite metric space with additional structure, optionally pointed.
struct StructuredSpace {
  StructuredSpace(FiniteMetricSpace space, Structure structure, std::optional<std::size_t> origin = std::nullopt);

  FiniteMetricSpace space;
  Structure structure;
  std::optional<std::size_t> origin;
};

/// The structure induced on f.target() by s on f.source().
Structure pushforward(const Structure& s, const IsometricEmbedding& f);

/// Distance between two structures on one host: points by the host metric,
/// measures by Prokhorov, subsets by Hausdorff (marked kinds on X^k x Xi with
/// the max product metric), curves by the sup over the shared grid, tuples by
/// their combinator. Throws KindMismatch or GridMismatch.
double ambient_distance(const Structure& s, const Structure& t, const FiniteMetricSpace& host,
                        const ProkhorovOptions& prokhorov = {});

enum class GravePolicy {
  Error,   ///< throw OutOfBall when a point or curve leaves the subspace
  Absent,  ///< return AbsentStructure for it instead
};

/// Restriction of s (living on f.target()) to the image of f, expressed on
/// f.source(). Measures keep the atoms whose tuples lie inside, subsets are
/// intersected, curves are stopped before their first exit.
Structure truncate(const Structure& s, const IsometricEmbedding& f, GravePolicy policy = GravePolicy::Error);

/// The natural partial order: atomwise for measures, inclusion for subsets,
/// prefix for curves, equality for points, componentwise for tuples. An
/// absent structure lies below everything.
bool structure_leq(const Structure& s, const Structure& t);

/// The least element below s: absent points and curves, zero measures, empty
/// subsets.
Structure bottom(const Structure& s);

}  // namespace ghforge
