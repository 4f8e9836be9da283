#pragma once

#include <cstddef>
#include <vector>

#include "ghforge/gh_compact.hpp"
#include "ghforge/structure.hpp"

namespace ghforge {

/// A structured space with a mandatory origin.
struct PointedStructuredSpace {
  PointedStructuredSpace(FiniteMetricSpace space, std::size_t origin, Structure structure = Structure::none());
  explicit PointedStructuredSpace(const StructuredSpace& s);

  StructuredSpace as_structured() const { return StructuredSpace(space, structure, origin); }

  FiniteMetricSpace space;
  std::size_t origin;
  Structure structure;
};

/// The closed ball of radius r around the origin with the truncated
/// structure. Under GravePolicy::Error a point or curve starting outside
/// the ball raises OutOfBall.
PointedStructuredSpace pcball(const PointedStructuredSpace& m, double r, GravePolicy policy = GravePolicy::Error);

/// The radii at which pcball changes and the ball on each segment
/// [breakpoints[i], breakpoints[i+1]).
struct RadialProfile {
  std::vector<double> breakpoints;
  std::vector<PointedStructuredSpace> segments;
};

RadialProfile radial_profile(const PointedStructuredSpace& m, GravePolicy policy = GravePolicy::Absent);

struct PointedOptions {
  std::size_t guard = kEnumerationGuard;
  /// Require pcball(N, 1/eps - eps) to lie below the candidate Y'. Turning
  /// this off lets a' range over everything below truncate(b, S).
  bool keep_lower_bound = true;
};

/// inf over Y' with pcball(N, 1/eps - eps) <= Y' <= N of the pointed compact
/// distance between pcball(M, 1/eps) and Y'.
double a_eps(const PointedStructuredSpace& m, const PointedStructuredSpace& n, double eps,
             const PointedOptions& options = {});

/// The same with explicit outer and inner radii.
double a_eps_radii(const PointedStructuredSpace& m, const PointedStructuredSpace& n, double outer, double inner,
                   const PointedOptions& options = {});

/// inf{eps in (0,1] : a_eps(M,N) and a_eps(N,M) are both < eps/2}, or 1.
double pointed_distance(const PointedStructuredSpace& m, const PointedStructuredSpace& n,
                        const PointedOptions& options = {});

/// Pointed compact distance between the r-balls.
double ball_distance(const PointedStructuredSpace& m, const PointedStructuredSpace& n, double r,
                     const PointedOptions& options = {});

/// The integral over r >= 0 of e^-r (1 ^ d(pcball(M,r), pcball(N,r))),
/// summed exactly over the segments of both radial profiles.
double integral_distance(const PointedStructuredSpace& m, const PointedStructuredSpace& n,
                         const PointedOptions& options = {});

struct SequenceOptions {
  std::vector<double> radius_grid;
  double cauchy_threshold = 0.1;
  std::size_t jobs = 1;
  PointedOptions pointed;
};

struct SequenceReport {
  std::vector<std::vector<double>> pointed;   ///< pairwise pointed_distance
  std::vector<std::vector<double>> integral;  ///< pairwise integral_distance
  std::vector<double> consecutive;            ///< pointed distance of X_i and X_{i+1}
  /// Sum of the consecutive distances over the second half of the sequence.
  double tail_sum = 0.0;
  bool cauchy = true;
  /// traces[k][i]: ball distance of X_i and X_{i+1} at radius_grid[k].
  std::vector<std::vector<double>> traces;
};

SequenceReport sequence_report(const std::vector<PointedStructuredSpace>& spaces, const SequenceOptions& options = {});

}  // namespace ghforge
