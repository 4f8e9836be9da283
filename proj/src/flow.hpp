#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ghforge::detail {

struct BipartiteFlow {
  double value = 0.0;
  std::vector<double> flow;            // row-major left x right
  std::vector<double> left_residual;   // capacity left unused on each source edge
  std::vector<double> right_residual;  // capacity left unused on each sink edge
};

/// Maximum flow from `left` supplies to `right` demands along the pairs
/// flagged in `allowed` (row-major, uncapacitated). Saturated edges end up
/// with residual exactly 0.
BipartiteFlow max_bipartite_flow(std::span<const double> left, std::span<const double> right,
                                 std::span<const char> allowed);

/// Least eps >= 0 with gap(eps) <= eps, where gap is nonincreasing and can
/// only change at the sorted breakpoints `cuts` (cuts[0] == 0), being
/// right-continuous there.
double first_feasible(const std::vector<double>& cuts, const std::function<double(double)>& gap);

}  // namespace ghforge::detail
