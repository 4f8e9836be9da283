#include "ghforge/gh_compact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>

#include "engine.hpp"
#include "matcher.hpp"

namespace ghforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_origins(const StructuredSpace& x, const StructuredSpace& y) {
  if (x.origin.has_value() != y.origin.has_value()) {
    throw Error(Errc::SignatureMismatch, "only one of the spaces has an origin");
  }
}

void check_relation(const StructuredSpace& x, const StructuredSpace& y, const Correspondence& r) {
  if (!(r.left() == x.space) || !(r.right() == y.space)) {
    throw Error(Errc::HostMismatch, "correspondence does not connect the given spaces");
  }
}

std::optional<std::pair<std::size_t, std::size_t>> forced_pair(const StructuredSpace& x, const StructuredSpace& y) {
  if (!x.origin) return std::nullopt;
  return std::pair{*x.origin, *y.origin};
}

Correspondence to_correspondence(const StructuredSpace& x, const StructuredSpace& y, const detail::Relation& r) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < r.n; ++i) {
    for (std::size_t j = 0; j < r.m; ++j) {
      if (r.has(i, j)) pairs.emplace_back(i, j);
    }
  }
  return Correspondence(x.space, y.space, std::move(pairs));
}

}  // namespace

bool DistanceResult::infeasible() const noexcept { return std::isinf(value); }

Feasibility feasible_at(const StructuredSpace& x, const StructuredSpace& y, const Correspondence& relation,
                        double eps) {
  check_origins(x, y);
  check_relation(x, y, relation);
  const detail::Matcher matcher(x.space, x.structure, y.space, y.structure);
  const auto r = detail::Relation::of(relation);
  Feasibility out;
  out.distortion = distortion(relation);
  out.certificates = matcher.certify(r, eps);
  bool ok = out.distortion <= 2.0 * eps;
  if (x.origin) {
    const bool related = r.has(*x.origin, *y.origin);
    out.certificates.insert(out.certificates.begin(),
                            Certificate{"origin", "points", related ? 0.0 : kInf, related, {}, {}});
    if (related) out.certificates.front().matches.emplace_back(*x.origin, *y.origin);
    ok = ok && related;
  }
  out.feasible = ok && matcher.feasible(r, eps);
  return out;
}

double per_correspondence_threshold(const StructuredSpace& x, const StructuredSpace& y,
                                    const Correspondence& relation) {
  check_origins(x, y);
  check_relation(x, y, relation);
  const auto r = detail::Relation::of(relation);
  if (x.origin && !r.has(*x.origin, *y.origin)) return kInf;
  const detail::Matcher matcher(x.space, x.structure, y.space, y.structure);
  return std::max(distortion(relation) / 2.0, matcher.threshold(r));
}

DistanceResult cgf_distance(const StructuredSpace& x, const StructuredSpace& y, const CompactOptions& options) {
  check_origins(x, y);
  const detail::Matcher matcher(x.space, x.structure, y.space, y.structure);
  const auto solved = detail::solve_correspondences(x.space, y.space, matcher, forced_pair(x, y), options.guard);
  DistanceResult out{solved.value, std::nullopt};
  if (options.want_witness && solved.relation) {
    auto certificates = matcher.certify(*solved.relation, solved.value);
    out.witness = Witness{to_correspondence(x, y, *solved.relation), std::move(certificates)};
  }
  return out;
}

DistanceResult gh_distance(const FiniteMetricSpace& x, const FiniteMetricSpace& y, const CompactOptions& options) {
  return cgf_distance(StructuredSpace(x, Structure::none()), StructuredSpace(y, Structure::none()), options);
}

DistanceResult ghp_distance(const FiniteMetricSpace& x, const FiniteMeasure& mu, const FiniteMetricSpace& y,
                            const FiniteMeasure& nu, const CompactOptions& options) {
  if (!(mu.host() == x) || !(nu.host() == y)) throw Error(Errc::HostMismatch, "measure lives on another space");
  return cgf_distance(StructuredSpace(x, Structure::measure(mu.weights())),
                      StructuredSpace(y, Structure::measure(nu.weights())), options);
}

std::optional<IsometricEmbedding> find_structured_isomorphism(const StructuredSpace& x, const StructuredSpace& y,
                                                              std::size_t guard) {
  if (x.space.size() + y.space.size() > guard) {
    throw Error(Errc::TooLarge, "isomorphism search needs |X| + |Y| <= " + std::to_string(guard));
  }
  if (x.space.size() != y.space.size() || x.origin.has_value() != y.origin.has_value()) return std::nullopt;
  if (signature(x.structure) != signature(y.structure)) return std::nullopt;
  std::optional<IsometricEmbedding> found;
  for_each_isometry(x.space, y.space, [&](const std::vector<std::size_t>& map) {
    if (x.origin && map[*x.origin] != *y.origin) return true;
    IsometricEmbedding f(x.space, y.space, map);
    if (pushforward(x.structure, f) == y.structure) {
      found = std::move(f);
      return false;
    }
    return true;
  });
  return found;
}

// ---------------------------------------------------------------------------
// covering numbers

namespace {

using Bits = std::vector<std::uint64_t>;

struct CoverSearch {
  std::size_t n;
  std::vector<Bits> ball;  // ball[c] = points within eps of c
  std::size_t best;

  static bool test(const Bits& b, std::size_t i) { return (b[i / 64] >> (i % 64)) & 1U; }

  void run(Bits covered, std::size_t used) {
    if (used >= best) return;
    std::size_t first = n;
    std::size_t missing = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!test(covered, i)) {
        if (first == n) first = i;
        ++missing;
      }
    }
    if (first == n) {
      best = used;
      return;
    }
    // lower bound: each further ball covers at most the largest ball size
    std::size_t widest = 0;
    for (const auto& b : ball) {
      std::size_t c = 0;
      for (std::size_t w = 0; w < b.size(); ++w) c += static_cast<std::size_t>(std::popcount(b[w] & ~covered[w]));
      widest = std::max(widest, c);
    }
    if (used + (missing + widest - 1) / widest >= best) return;
    for (std::size_t c = 0; c < n; ++c) {
      if (!test(ball[c], first)) continue;
      Bits next = covered;
      for (std::size_t w = 0; w < next.size(); ++w) next[w] |= ball[c][w];
      run(std::move(next), used + 1);
    }
  }
};

std::size_t greedy_cover(const std::vector<Bits>& ball, std::size_t n) {
  Bits covered(ball.front().size(), 0);
  std::size_t left = n, count = 0;
  while (left > 0) {
    std::size_t pick = 0, gain = 0;
    for (std::size_t c = 0; c < ball.size(); ++c) {
      std::size_t g = 0;
      for (std::size_t w = 0; w < covered.size(); ++w) g += static_cast<std::size_t>(std::popcount(ball[c][w] & ~covered[w]));
      if (g > gain) {
        gain = g;
        pick = c;
      }
    }
    for (std::size_t w = 0; w < covered.size(); ++w) covered[w] |= ball[pick][w];
    left -= gain;
    ++count;
  }
  return count;
}

}  // namespace

CoveringNumber covering_number(const FiniteMetricSpace& x, double eps, std::size_t exact_guard) {
  if (!(eps >= 0.0)) throw Error(Errc::InvalidArgument, "eps must be >= 0");
  const std::size_t n = x.size();
  const std::size_t words = (n + 63) / 64;
  std::vector<Bits> ball(n, Bits(words, 0));
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      if (x(c, i) <= eps) ball[c][i / 64] |= std::uint64_t{1} << (i % 64);
    }
  }
  const std::size_t greedy = greedy_cover(ball, n);
  if (n > exact_guard) return {greedy, false};
  CoverSearch search{n, ball, greedy};
  search.run(Bits(words, 0), 0);
  return {search.best, true};
}

// ---------------------------------------------------------------------------
// pre-compactness diagnostics

namespace {

void collect(const Structure& s, const std::string& path, std::map<std::string, double>& mass,
             std::map<std::string, std::set<std::size_t>>& marks) {
  switch (s.kind()) {
    case StructureKind::Measure: {
      double total = 0.0;
      for (auto [i, w] : s.as<MeasureStructure>().weights) total += w;
      mass[path] = std::max(mass[path], total);
      break;
    }
    case StructureKind::MarkedMeasure: {
      double total = 0.0;
      auto& hull = marks[path];
      for (const auto& a : s.as<MarkedMeasureStructure>().atoms) {
        total += a.weight;
        hull.insert(a.at.mark);
      }
      mass[path] = std::max(mass[path], total);
      break;
    }
    case StructureKind::MarkedSubset: {
      auto& hull = marks[path];
      for (const auto& p : s.as<MarkedSubsetStructure>().members) hull.insert(p.mark);
      break;
    }
    case StructureKind::Tuple: {
      const auto& t = s.as<TupleStructure>();
      for (std::size_t i = 0; i < t.children.size(); ++i) {
        collect(t.children[i], path.empty() ? std::to_string(i) : path + "." + std::to_string(i), mass, marks);
      }
      break;
    }
    default:
      break;
  }
}

}  // namespace

PrecompactProfile precompact_profile(const std::vector<StructuredSpace>& family, const std::vector<double>& eps_grid,
                                     std::size_t exact_guard) {
  if (!family.empty()) {
    const auto sig = signature(family.front().structure);
    for (const auto& s : family) {
      if (signature(s.structure) != sig) {
        throw Error(Errc::SignatureMismatch, "family mixes " + sig + " and " + signature(s.structure));
      }
    }
  }
  PrecompactProfile out;
  for (double eps : eps_grid) {
    PrecompactRow row{eps, 0, true};
    for (const auto& s : family) {
      const auto c = covering_number(s.space, eps, exact_guard);
      row.max_covering = std::max(row.max_covering, c.count);
      row.exact = row.exact && c.exact;
    }
    out.rows.push_back(row);
  }
  std::map<std::string, double> mass;
  std::map<std::string, std::set<std::size_t>> marks;
  for (const auto& s : family) collect(s.structure, "", mass, marks);
  for (const auto& [path, m] : mass) out.mass_bounds.emplace_back(path, m);
  for (const auto& [path, hull] : marks) out.mark_hulls.emplace_back(path, std::vector<std::size_t>(hull.begin(), hull.end()));
  return out;
}

}  // namespace ghforge
