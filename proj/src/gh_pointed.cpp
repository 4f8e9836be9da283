#include "ghforge/gh_pointed.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <thread>

#include "engine.hpp"
#include "matcher.hpp"

namespace ghforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> origin_radii(const PointedStructuredSpace& m) {
  std::vector<double> r;
  for (std::size_t i = 0; i < m.space.size(); ++i) r.push_back(m.space(m.origin, i));
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

double snap(double value, const std::vector<double>& radii) {
  for (double r : radii) {
    if (std::abs(value - r) <= 1e-12 * std::max(1.0, r)) return r;
  }
  return value;
}

template <class F>
void parallel_for(std::size_t count, std::size_t jobs, F&& body) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_lock);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

PointedStructuredSpace::PointedStructuredSpace(FiniteMetricSpace s, std::size_t o, Structure st)
    : space(std::move(s)), origin(o), structure(std::move(st)) {
  if (origin >= space.size()) throw Error(Errc::InvalidArgument, "origin index out of range", {origin});
  structure.validate_on(space.size());
}

PointedStructuredSpace::PointedStructuredSpace(const StructuredSpace& s)
    : space(s.space), origin(0), structure(s.structure) {
  if (!s.origin) throw Error(Errc::InvalidArgument, "a pointed space needs an origin");
  origin = *s.origin;
}

PointedStructuredSpace pcball(const PointedStructuredSpace& m, double r, GravePolicy policy) {
  const auto ball = closed_ball(PointedSpace(m.space, m.origin), r);
  return PointedStructuredSpace(ball.space, ball.origin, truncate(m.structure, ball.inclusion, policy));
}

RadialProfile radial_profile(const PointedStructuredSpace& m, GravePolicy policy) {
  RadialProfile out;
  out.breakpoints = origin_radii(m);
  for (double r : out.breakpoints) out.segments.push_back(pcball(m, r, policy));
  return out;
}

double a_eps_radii(const PointedStructuredSpace& m, const PointedStructuredSpace& n, double outer, double inner,
                   const PointedOptions& options) {
  const auto left = pcball(m, outer, GravePolicy::Absent);

  std::vector<std::size_t> core, optional;
  for (std::size_t i = 0; i < n.space.size(); ++i) {
    (n.space(n.origin, i) <= inner ? core : optional).push_back(i);
  }
  if (optional.size() > 24) throw Error(Errc::TooLarge, "too many optional points for the a_eps search");
  const auto core_embedding = IsometricEmbedding::inclusion(n.space, core);
  const Structure core_structure = truncate(n.structure, core_embedding, GravePolicy::Absent);

  double best = kInf;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << optional.size()) && best > 0.0; ++mask) {
    // Points beyond outer + 2 best cannot take part in anything better.
    bool useful = true;
    std::vector<std::size_t> support = core;
    for (std::size_t k = 0; k < optional.size(); ++k) {
      if (!((mask >> k) & 1U)) continue;
      if (n.space(n.origin, optional[k]) - outer > 2.0 * best) useful = false;
      support.push_back(optional[k]);
    }
    if (!useful) continue;
    std::sort(support.begin(), support.end());

    const auto inclusion = IsometricEmbedding::inclusion(n.space, support);
    const FiniteMetricSpace& host = inclusion.source();
    const Structure upper = truncate(n.structure, inclusion, GravePolicy::Absent);
    Structure lower = bottom(upper);
    if (options.keep_lower_bound) {
      std::vector<std::size_t> core_in_support;
      for (auto i : core) core_in_support.push_back(*inclusion.preimage(i));
      lower = pushforward(core_structure, IsometricEmbedding(core_embedding.source(), host, core_in_support));
    }
    const std::size_t origin = *inclusion.preimage(n.origin);
    const detail::Matcher matcher(left.space, left.structure, host, upper, lower);
    const auto solved =
        detail::solve_correspondences(left.space, host, matcher, std::pair{left.origin, origin}, options.guard);
    best = std::min(best, solved.value);
  }
  return best;
}

double a_eps(const PointedStructuredSpace& m, const PointedStructuredSpace& n, double eps,
             const PointedOptions& options) {
  if (!(eps > 0.0 && eps <= 1.0)) throw Error(Errc::InvalidArgument, "eps must lie in (0, 1]");
  return a_eps_radii(m, n, 1.0 / eps, 1.0 / eps - eps, options);
}

double pointed_distance(const PointedStructuredSpace& m, const PointedStructuredSpace& n,
                        const PointedOptions& options) {
  std::vector<double> radii = origin_radii(m);
  const auto rn = origin_radii(n);
  radii.insert(radii.end(), rn.begin(), rn.end());
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  // eps where 1/eps or 1/eps - eps meets a radius
  std::vector<double> critical{1.0};
  for (double r : radii) {
    if (r >= 1.0) critical.push_back(1.0 / r);
    critical.push_back((std::sqrt(r * r + 4.0) - r) / 2.0);
  }
  std::sort(critical.begin(), critical.end());
  critical.erase(std::unique(critical.begin(), critical.end()), critical.end());
  critical.erase(std::remove_if(critical.begin(), critical.end(), [](double e) { return !(e > 0.0 && e <= 1.0); }),
                 critical.end());

  auto both = [&](double outer, double inner) {
    const double forward = a_eps_radii(m, n, outer, inner, options);
    if (forward == kInf) return kInf;
    return std::max(forward, a_eps_radii(n, m, outer, inner, options));
  };

  double previous = 0.0;
  for (double c : critical) {
    // open cell (previous, c): both balls are fixed, so the value is constant
    const double mid = (previous + c) / 2.0;
    const double inside = both(1.0 / mid, 1.0 / mid - mid);
    if (2.0 * inside < c) return std::max(previous, 2.0 * inside);
    const double at = both(snap(1.0 / c, radii), std::max(0.0, snap(1.0 / c - c, radii)));
    if (at < c / 2.0) return c;
    previous = c;
  }
  return 1.0;
}

double ball_distance(const PointedStructuredSpace& m, const PointedStructuredSpace& n, double r,
                     const PointedOptions& options) {
  const auto a = pcball(m, r, GravePolicy::Absent), b = pcball(n, r, GravePolicy::Absent);
  CompactOptions compact;
  compact.guard = options.guard;
  compact.want_witness = false;
  return cgf_distance(a.as_structured(), b.as_structured(), compact).value;
}

double integral_distance(const PointedStructuredSpace& m, const PointedStructuredSpace& n,
                         const PointedOptions& options) {
  std::vector<double> cuts = origin_radii(m);
  const auto rn = origin_radii(n);
  cuts.insert(cuts.end(), rn.begin(), rn.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    const double d = ball_distance(m, n, cuts[k], options);
    if (d == 0.0) continue;
    const double weight = k + 1 < cuts.size() ? std::exp(-cuts[k]) - std::exp(-cuts[k + 1]) : std::exp(-cuts[k]);
    total += weight * std::min(1.0, d);
  }
  return total;
}

SequenceReport sequence_report(const std::vector<PointedStructuredSpace>& spaces, const SequenceOptions& options) {
  const std::size_t count = spaces.size();
  if (count > 0) {
    const auto sig = signature(spaces.front().structure);
    for (const auto& s : spaces) {
      if (signature(s.structure) != sig) {
        throw Error(Errc::SignatureMismatch, "sequence mixes " + sig + " and " + signature(s.structure));
      }
    }
  }
  SequenceReport out;
  out.pointed.assign(count, std::vector<double>(count, 0.0));
  out.integral.assign(count, std::vector<double>(count, 0.0));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) pairs.emplace_back(i, j);
  }
  parallel_for(pairs.size(), options.jobs, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    out.pointed[i][j] = out.pointed[j][i] = pointed_distance(spaces[i], spaces[j], options.pointed);
    out.integral[i][j] = out.integral[j][i] = integral_distance(spaces[i], spaces[j], options.pointed);
  });
  for (std::size_t i = 0; i + 1 < count; ++i) out.consecutive.push_back(out.pointed[i][i + 1]);
  for (std::size_t i = out.consecutive.size() / 2; i < out.consecutive.size(); ++i) out.tail_sum += out.consecutive[i];
  out.cauchy = out.tail_sum < options.cauchy_threshold;

  out.traces.assign(options.radius_grid.size(), std::vector<double>(count > 0 ? count - 1 : 0, 0.0));
  parallel_for(options.radius_grid.size() * (count > 0 ? count - 1 : 0), options.jobs, [&](std::size_t k) {
    const std::size_t r = k / (count - 1), i = k % (count - 1);
    out.traces[r][i] = ball_distance(spaces[i], spaces[i + 1], options.radius_grid[r], options.pointed);
  });
  return out;
}

}  // namespace ghforge
