#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ghforge/metric_space.hpp"
#include "ghforge/structure.hpp"

namespace ghforge {

/// Evidence that one structure component holds for a correspondence at some
/// eps. Indices in `matches` and `transport` refer to the component's items
/// (points, members, atoms or samples) in their canonical order.
struct Certificate {
  std::string path;  ///< "" for the root, "0.1" for child 1 of child 0
  std::string kind;  ///< "points", "subset", "measure" or "curve"
  double threshold = 0.0;
  bool holds = false;
  std::vector<std::pair<std::size_t, std::size_t>> matches;
  std::vector<std::tuple<std::size_t, std::size_t, double>> transport;
};

struct Witness {
  Correspondence relation;
  std::vector<Certificate> certificates;
};

struct DistanceResult {
  double value = 0.0;  ///< +infinity when no correspondence works
  std::optional<Witness> witness;

  bool infeasible() const noexcept;
};

struct CompactOptions {
  /// Largest |X| + |Y| accepted.
  std::size_t guard = kEnumerationGuard;
  bool want_witness = true;
};

struct Feasibility {
  bool feasible = false;
  double distortion = 0.0;
  std::vector<Certificate> certificates;
};

/// Whether R certifies d(X, Y) <= eps: dis(R) <= 2 eps, the origins (if any)
/// are related, and every structure component passes its R-based test.
Feasibility feasible_at(const StructuredSpace& x, const StructuredSpace& y, const Correspondence& relation,
                        double eps);

/// The least eps at which feasible_at holds for this R, +infinity if none.
double per_correspondence_threshold(const StructuredSpace& x, const StructuredSpace& y,
                                    const Correspondence& relation);

/// The structured Gromov-Hausdorff distance, exact for finite inputs.
DistanceResult cgf_distance(const StructuredSpace& x, const StructuredSpace& y, const CompactOptions& options = {});

/// Plain Gromov-Hausdorff distance (structures and origins ignored).
DistanceResult gh_distance(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                           const CompactOptions& options = {});

/// Gromov-Hausdorff-Prokhorov distance of two measured spaces.
DistanceResult ghp_distance(const FiniteMetricSpace& x, const FiniteMeasure& mu, const FiniteMetricSpace& y,
                            const FiniteMeasure& nu, const CompactOptions& options = {});

/// Exhaustive reference implementation of cgf_distance with independent inner
/// solvers. Guarded at |X| + |Y| <= guard (default 10).
DistanceResult oracle_cgf(const StructuredSpace& x, const StructuredSpace& y, std::size_t guard = 10);

/// An isometric bijection carrying structure and origin of x onto those of y.
std::optional<IsometricEmbedding> find_structured_isomorphism(const StructuredSpace& x, const StructuredSpace& y,
                                                              std::size_t guard = kEnumerationGuard);

struct CoveringNumber {
  std::size_t count = 0;
  bool exact = true;  ///< false when the greedy upper bound was used
};

/// Least number of closed eps-balls centred at points of X that cover X.
/// Exact branch-and-bound up to `exact_guard` points, greedy beyond.
CoveringNumber covering_number(const FiniteMetricSpace& x, double eps, std::size_t exact_guard = 24);

struct PrecompactRow {
  double eps = 0.0;
  std::size_t max_covering = 0;
  bool exact = true;
};

struct PrecompactProfile {
  std::vector<PrecompactRow> rows;
  /// Component path -> largest total mass over the family (measure kinds).
  std::vector<std::pair<std::string, double>> mass_bounds;
  /// Component path -> sorted mark indices used anywhere in the family.
  std::vector<std::pair<std::string, std::vector<std::size_t>>> mark_hulls;
};

PrecompactProfile precompact_profile(const std::vector<StructuredSpace>& family, const std::vector<double>& eps_grid,
                                     std::size_t exact_guard = 24);

}  // namespace ghforge
