#include "ghforge/base_distances.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "flow.hpp"

namespace ghforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pos_sum(const Weights& a, const Weights& b) {
  double s = 0.0;
  for (auto [i, w] : a) {
    auto it = b.find(i);
    const double other = it == b.end() ? 0.0 : it->second;
    if (w > other) s += w - other;
  }
  return s;
}

// Sorted distinct cross distances, always including 0.
std::vector<double> breakpoints(std::size_t n, std::size_t m,
                                const std::function<double(std::size_t, std::size_t)>& cross) {
  std::vector<double> values{0.0};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) values.push_back(cross(i, j));
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

}  // namespace

// ---------------------------------------------------------------------------

FiniteMeasure::FiniteMeasure(FiniteMetricSpace host, Weights weights) : host_(std::move(host)) {
  for (auto [i, w] : weights) {
    if (i >= host_.size()) throw Error(Errc::HostMismatch, "measure atom outside its host", {i});
    if (!std::isfinite(w) || w < 0.0) throw Error(Errc::InvalidArgument, "measure weights must be finite and >= 0", {i});
    if (w > 0.0) weights_.emplace(i, w);
  }
}

double FiniteMeasure::weight(std::size_t i) const {
  auto it = weights_.find(i);
  return it == weights_.end() ? 0.0 : it->second;
}

double FiniteMeasure::total_mass() const {
  double s = 0.0;
  for (auto [i, w] : weights_) s += w;
  return s;
}

Coupling::Coupling(FiniteMetricSpace left_host, FiniteMetricSpace right_host, std::map<IndexPair, double> mass)
    : left_(std::move(left_host)), right_(std::move(right_host)) {
  for (auto [p, w] : mass) {
    if (p.first >= left_.size() || p.second >= right_.size()) {
      throw Error(Errc::HostMismatch, "coupling atom outside its hosts", {p.first, p.second});
    }
    if (!std::isfinite(w) || w < 0.0) throw Error(Errc::InvalidArgument, "coupling masses must be finite and >= 0");
    if (w > 0.0) mass_.emplace(p, w);
  }
}

double Coupling::total_mass() const {
  double s = 0.0;
  for (auto [p, w] : mass_) s += w;
  return s;
}

FiniteMeasure Coupling::left_marginal() const {
  Weights w;
  for (auto [p, m] : mass_) w[p.first] += m;
  return FiniteMeasure(left_, std::move(w));
}

FiniteMeasure Coupling::right_marginal() const {
  Weights w;
  for (auto [p, m] : mass_) w[p.second] += m;
  return FiniteMeasure(right_, std::move(w));
}

double Coupling::mass_outside(const std::set<IndexPair>& allowed) const {
  double s = 0.0;
  for (auto [p, m] : mass_) {
    if (!allowed.contains(p)) s += m;
  }
  return s;
}

// ---------------------------------------------------------------------------

double hausdorff_distance(const FiniteMetricSpace& host, std::span<const std::size_t> a,
                          std::span<const std::size_t> b) {
  for (auto i : a) {
    if (i >= host.size()) throw Error(Errc::HostMismatch, "subset index outside its host", {i});
  }
  for (auto i : b) {
    if (i >= host.size()) throw Error(Errc::HostMismatch, "subset index outside its host", {i});
  }
  return detail::hausdorff_generic(a.size(), b.size(),
                                   [&](std::size_t i, std::size_t j) { return host(a[i], b[j]); });
}

double total_variation(const FiniteMeasure& mu, const FiniteMeasure& nu) {
  if (!(mu.host() == nu.host())) throw Error(Errc::HostMismatch, "total variation needs a common host");
  return std::max(pos_sum(mu.weights(), nu.weights()), pos_sum(nu.weights(), mu.weights()));
}

double discrepancy(const Coupling& alpha, const FiniteMeasure& mu, const FiniteMeasure& nu) {
  if (!(alpha.left_host() == mu.host()) || !(alpha.right_host() == nu.host())) {
    throw Error(Errc::HostMismatch, "coupling hosts differ from the measures' hosts");
  }
  return total_variation(alpha.left_marginal(), mu) + total_variation(alpha.right_marginal(), nu);
}

namespace {

struct Atoms {
  std::vector<std::size_t> index;
  std::vector<double> mass;
};

Atoms atoms_of(const FiniteMeasure& m) {
  Atoms a;
  for (auto [i, w] : m.weights()) {
    a.index.push_back(i);
    a.mass.push_back(w);
  }
  return a;
}

}  // namespace

double prokhorov_distance(const FiniteMeasure& mu, const FiniteMeasure& nu, const ProkhorovOptions& options) {
  if (!(mu.host() == nu.host())) throw Error(Errc::HostMismatch, "Prokhorov distance needs a common host");
  const auto a = atoms_of(mu), b = atoms_of(nu);
  auto cross = [&](std::size_t i, std::size_t j) { return mu.host()(a.index[i], b.index[j]); };
  if (std::max(a.mass.size(), b.mass.size()) > options.subset_guard) {
    if (!options.coupling_fallback) {
      throw Error(Errc::TooLarge, "Prokhorov subset scan exceeds the guard of " + std::to_string(options.subset_guard));
    }
    return detail::prokhorov_coupling(a.mass, b.mass, cross);
  }
  return detail::prokhorov_scan(a.mass, b.mass, cross, options.subset_guard);
}

double prokhorov_by_coupling(const FiniteMeasure& mu, const FiniteMeasure& nu) {
  if (!(mu.host() == nu.host())) throw Error(Errc::HostMismatch, "Prokhorov distance needs a common host");
  const auto a = atoms_of(mu), b = atoms_of(nu);
  return detail::prokhorov_coupling(a.mass, b.mass,
                                    [&](std::size_t i, std::size_t j) { return mu.host()(a.index[i], b.index[j]); });
}

MinDiscrepancy min_discrepancy_outside(const FiniteMeasure& mu, const FiniteMeasure& nu,
                                       const std::set<IndexPair>& allowed) {
  const auto a = atoms_of(mu), b = atoms_of(nu);
  const std::size_t n = a.mass.size(), m = b.mass.size();
  std::vector<char> mask(n * m, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) mask[i * m + j] = allowed.contains({a.index[i], b.index[j]}) ? 1 : 0;
  }
  const auto flow = detail::max_bipartite_flow(a.mass, b.mass, mask);

  std::map<IndexPair, double> mass;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (flow.flow[i * m + j] > 0.0) mass[{a.index[i], b.index[j]}] += flow.flow[i * m + j];
    }
  }
  // Pair the leftovers across whatever pairs remain; none of them is allowed,
  // otherwise the flow would not be maximal.
  auto left = flow.left_residual;
  auto right = flow.right_residual;
  std::size_t i = 0, j = 0;
  while (i < n && j < m) {
    const double moved = std::min(left[i], right[j]);
    if (moved > 0.0) mass[{a.index[i], b.index[j]}] += moved;
    left[i] -= moved;
    right[j] -= moved;
    if (left[i] <= 0.0) ++i;
    if (j < m && right[j] <= 0.0) ++j;
  }

  double left_excess = 0.0, right_excess = 0.0;
  for (double r : flow.left_residual) left_excess += r;
  for (double r : flow.right_residual) right_excess += r;
  return MinDiscrepancy{std::max(left_excess, right_excess), flow.value,
                        Coupling(mu.host(), nu.host(), std::move(mass))};
}

// ---------------------------------------------------------------------------

namespace detail {

double hausdorff_generic(std::size_t left_size, std::size_t right_size,
                         const std::function<double(std::size_t, std::size_t)>& cross) {
  if (left_size == 0 && right_size == 0) return 0.0;
  if (left_size == 0 || right_size == 0) return kInf;
  double worst = 0.0;
  for (std::size_t i = 0; i < left_size; ++i) {
    double best = kInf;
    for (std::size_t j = 0; j < right_size; ++j) best = std::min(best, cross(i, j));
    worst = std::max(worst, best);
  }
  for (std::size_t j = 0; j < right_size; ++j) {
    double best = kInf;
    for (std::size_t i = 0; i < left_size; ++i) best = std::min(best, cross(i, j));
    worst = std::max(worst, best);
  }
  return worst;
}

double prokhorov_scan(std::span<const double> left, std::span<const double> right,
                      const std::function<double(std::size_t, std::size_t)>& cross, std::size_t subset_guard) {
  const std::size_t n = left.size(), m = right.size();
  if (std::max(n, m) > subset_guard || std::max(n, m) > 30) {
    throw Error(Errc::TooLarge, "Prokhorov subset scan exceeds the guard of " + std::to_string(subset_guard));
  }
  const auto cuts = breakpoints(n, m, cross);
  // Largest violation of  mu(A) <= nu(A^eps) + eps  over subsets A of either
  // support, ignoring the "+ eps".
  auto gap = [&](double eps) {
    double worst = 0.0;
    for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n); ++mask) {
      double inside = 0.0, reached = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask >> i & 1U) inside += left[i];
      }
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
          if ((mask >> i & 1U) && cross(i, j) <= eps) {
            reached += right[j];
            break;
          }
        }
      }
      worst = std::max(worst, inside - reached);
    }
    for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << m); ++mask) {
      double inside = 0.0, reached = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        if (mask >> j & 1U) inside += right[j];
      }
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          if ((mask >> j & 1U) && cross(i, j) <= eps) {
            reached += left[i];
            break;
          }
        }
      }
      worst = std::max(worst, inside - reached);
    }
    return worst;
  };
  return first_feasible(cuts, gap);
}

double prokhorov_coupling(std::span<const double> left, std::span<const double> right,
                          const std::function<double(std::size_t, std::size_t)>& cross) {
  const std::size_t n = left.size(), m = right.size();
  const auto cuts = breakpoints(n, m, cross);
  std::vector<char> mask(n * m);
  auto cost = [&](double eps) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) mask[i * m + j] = cross(i, j) <= eps ? 1 : 0;
    }
    const auto flow = max_bipartite_flow(left, right, mask);
    double l = 0.0, r = 0.0;
    for (double x : flow.left_residual) l += x;
    for (double x : flow.right_residual) r += x;
    return std::max(l, r);
  };
  return first_feasible(cuts, cost);
}

}  // namespace detail

}  // namespace ghforge
