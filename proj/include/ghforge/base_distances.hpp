#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "ghforge/metric_space.hpp"

namespace ghforge {

/// Point index -> positive weight. Absent indices carry zero mass.
using Weights = std::map<std::size_t, double>;
using IndexPair = std::pair<std::size_t, std::size_t>;

/// A finite measure on the points of a host space.
class FiniteMeasure {
 public:
  /// Zero weights are dropped; negative or non-finite weights and indices
  /// outside the host are rejected.
  FiniteMeasure(FiniteMetricSpace host, Weights weights);

  const FiniteMetricSpace& host() const noexcept { return host_; }
  const Weights& weights() const noexcept { return weights_; }
  double weight(std::size_t i) const;
  double total_mass() const;

 private:
  FiniteMetricSpace host_;
  Weights weights_;
};

/// A finitely supported measure on left_host x right_host.
class Coupling {
 public:
  Coupling(FiniteMetricSpace left_host, FiniteMetricSpace right_host, std::map<IndexPair, double> mass);

  const FiniteMetricSpace& left_host() const noexcept { return left_; }
  const FiniteMetricSpace& right_host() const noexcept { return right_; }
  const std::map<IndexPair, double>& mass() const noexcept { return mass_; }
  double total_mass() const;

  FiniteMeasure left_marginal() const;
  FiniteMeasure right_marginal() const;
  /// Mass carried by pairs not contained in `allowed`.
  double mass_outside(const std::set<IndexPair>& allowed) const;

 private:
  FiniteMetricSpace left_;
  FiniteMetricSpace right_;
  std::map<IndexPair, double> mass_;
};

/// Hausdorff distance between two index sets of one host. Both empty gives
/// 0; exactly one empty gives +infinity.
double hausdorff_distance(const FiniteMetricSpace& host, std::span<const std::size_t> a,
                          std::span<const std::size_t> b);

/// sup over subsets A of |mu(A) - nu(A)|.
double total_variation(const FiniteMeasure& mu, const FiniteMeasure& nu);

/// TV(first marginal, mu) + TV(second marginal, nu).
double discrepancy(const Coupling& alpha, const FiniteMeasure& mu, const FiniteMeasure& nu);

struct ProkhorovOptions {
  /// Supports larger than this switch to the coupling characterization.
  std::size_t subset_guard = 12;
  bool coupling_fallback = true;
};

/// Prokhorov distance of two finite measures on one host, by scanning the
/// finitely many breakpoints of the neighbourhood structure and testing every
/// subset of the supports.
double prokhorov_distance(const FiniteMeasure& mu, const FiniteMeasure& nu, const ProkhorovOptions& options = {});

/// The same distance, computed as the least eps for which some coupling
/// restricted to pairs at distance <= eps has discrepancy-plus-leakage <= eps.
double prokhorov_by_coupling(const FiniteMeasure& mu, const FiniteMeasure& nu);

struct MinDiscrepancy {
  double value;          ///< min over alpha of D(alpha; mu, nu) + alpha(outside)
  double transported;    ///< maximal mass movable along allowed pairs
  Coupling witness;      ///< a coupling attaining `value`
};

/// min over couplings alpha of D(alpha; mu, nu) + alpha(complement of
/// allowed). mu lives on the left host, nu on the right host.
/// value = max(mu(X), nu(Y)) - (max flow along allowed pairs).
MinDiscrepancy min_discrepancy_outside(const FiniteMeasure& mu, const FiniteMeasure& nu,
                                       const std::set<IndexPair>& allowed);

namespace detail {

/// Prokhorov distance between two atom lists given only the cross distances
/// d(left atom i, right atom j). Throws TooLarge if a support exceeds
/// `subset_guard`.
double prokhorov_scan(std::span<const double> left, std::span<const double> right,
                      const std::function<double(std::size_t, std::size_t)>& cross, std::size_t subset_guard);

double prokhorov_coupling(std::span<const double> left, std::span<const double> right,
                          const std::function<double(std::size_t, std::size_t)>& cross);

/// Hausdorff distance between two member lists given their cross distances.
double hausdorff_generic(std::size_t left_size, std::size_t right_size,
                         const std::function<double(std::size_t, std::size_t)>& cross);

}  // namespace detail

}  // namespace ghforge
