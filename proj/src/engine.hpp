#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>

#include "matcher.hpp"

namespace ghforge::detail {

struct EngineResult {
  double value = 0.0;
  std::optional<Relation> relation;  // a correspondence attaining value
};

/// min over correspondences R (containing `forced`, if given) of
/// max(dis(R)/2, matcher.threshold(R)).
///
/// Works level by level over the distinct distortion values: at each level
/// the admissible R are the cliques of a compatibility graph on X x Y, and
/// since thresholds only drop as R grows, maximal cliques suffice.
EngineResult solve_correspondences(const FiniteMetricSpace& left, const FiniteMetricSpace& right,
                                   const Matcher& matcher, std::optional<std::pair<std::size_t, std::size_t>> forced,
                                   std::size_t guard);

}  // namespace ghforge::detail
