// Exhaustive reference for cgf_distance: correspondences are enumerated one by
// one and each component test is evaluated straight from its definition.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "ghforge/gh_compact.hpp"

namespace ghforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Rel {
  std::size_t m;
  std::uint64_t mask;
  bool has(std::size_t i, std::size_t j) const { return (mask >> (i * m + j)) & 1U; }
};

struct Elem {
  std::vector<std::size_t> pts;
  std::size_t mark;
  double w;
};

struct Marked {
  std::vector<Elem> elems;
  const MarkSpace* marks = nullptr;
};

Marked flatten(const Structure& s) {
  static const MarkSpace trivial = MarkSpace::trivial();
  Marked out;
  out.marks = &trivial;
  switch (s.kind()) {
    case StructureKind::Subset:
      for (auto i : s.as<SubsetStructure>().members) out.elems.push_back({{i}, 0, 1.0});
      break;
    case StructureKind::MarkedSubset:
      out.marks = &s.as<MarkedSubsetStructure>().marks;
      for (const auto& p : s.as<MarkedSubsetStructure>().members) out.elems.push_back({p.points, p.mark, 1.0});
      break;
    case StructureKind::Measure:
      for (auto [i, w] : s.as<MeasureStructure>().weights) out.elems.push_back({{i}, 0, w});
      break;
    case StructureKind::MarkedMeasure:
      out.marks = &s.as<MarkedMeasureStructure>().marks;
      for (const auto& a : s.as<MarkedMeasureStructure>().atoms) out.elems.push_back({a.at.points, a.at.mark, a.weight});
      break;
    default:
      break;
  }
  return out;
}

bool related(const Rel& r, const Elem& a, const Elem& b) {
  for (std::size_t t = 0; t < a.pts.size(); ++t) {
    if (!r.has(a.pts[t], b.pts[t])) return false;
  }
  return true;
}

std::vector<double> mark_candidates(const Marked& a, const Marked& b) {
  std::vector<double> c{0.0};
  for (const auto& x : a.elems) {
    for (const auto& y : b.elems) c.push_back(a.marks->distance(x.mark, y.mark));
  }
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

// Every member on either side has a partner in R_{k,eps}.
bool subsets_hold(const Rel& r, const Marked& a, const Marked& b, double eps) {
  auto partner = [&](const Elem& x, const Marked& other, bool flip) {
    for (const auto& y : other.elems) {
      const bool rel = flip ? related(r, y, x) : related(r, x, y);
      if (rel && a.marks->distance(x.mark, y.mark) <= eps) return true;
    }
    return false;
  };
  for (const auto& x : a.elems) {
    if (!partner(x, b, false)) return false;
  }
  for (const auto& y : b.elems) {
    if (!partner(y, a, true)) return false;
  }
  return true;
}

// Max flow from a to b along allowed pairs, via the min cut over every set
// of left atoms: F = min_A a(left \ A) + b(N(A)).
double max_flow_by_cuts(const Rel& r, const Marked& a, const Marked& b, double eps) {
  const std::size_t p = a.elems.size(), q = b.elems.size();
  std::vector<std::uint32_t> neighbours(p, 0);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      if (related(r, a.elems[i], b.elems[j]) && a.marks->distance(a.elems[i].mark, b.elems[j].mark) <= eps) {
        neighbours[i] |= std::uint32_t{1} << j;
      }
    }
  }
  double best = kInf;
  for (std::uint32_t set = 0; set < (std::uint32_t{1} << p); ++set) {
    double cut = 0.0;
    std::uint32_t reach = 0;
    for (std::size_t i = 0; i < p; ++i) {
      if (set >> i & 1U) {
        reach |= neighbours[i];
      } else {
        cut += a.elems[i].w;
      }
    }
    for (std::size_t j = 0; j < q; ++j) {
      if (reach >> j & 1U) cut += b.elems[j].w;
    }
    best = std::min(best, cut);
  }
  return best;
}

double measure_gap(const Rel& r, const Marked& a, const Marked& b, double eps) {
  double ma = 0.0, mb = 0.0;
  for (const auto& x : a.elems) ma += x.w;
  for (const auto& y : b.elems) mb += y.w;
  return std::max(0.0, std::max(ma, mb) - max_flow_by_cuts(r, a, b, eps));
}

bool curves_hold(const Rel& r, const CurveStructure& a, const CurveStructure& b) {
  const std::size_t len = std::max(a.values.size(), b.values.size());
  for (std::size_t t = 0; t < len; ++t) {
    if (!r.has(a.values[std::min(t, a.values.size() - 1)], b.values[std::min(t, b.values.size() - 1)])) return false;
  }
  return true;
}

double oracle_threshold(const Rel& r, const Structure& a, const Structure& b) {
  if (a.kind() == StructureKind::Absent || b.kind() == StructureKind::Absent) {
    return a.kind() == b.kind() ? 0.0 : kInf;
  }
  switch (a.kind()) {
    case StructureKind::Point:
      return r.has(a.as<PointStructure>().index, b.as<PointStructure>().index) ? 0.0 : kInf;
    case StructureKind::Subset:
    case StructureKind::MarkedSubset: {
      const auto fa = flatten(a), fb = flatten(b);
      for (double eps : mark_candidates(fa, fb)) {
        if (subsets_hold(r, fa, fb, eps)) return eps;
      }
      return kInf;
    }
    case StructureKind::Measure:
    case StructureKind::MarkedMeasure: {
      const auto fa = flatten(a), fb = flatten(b);
      auto cands = mark_candidates(fa, fb);
      const std::size_t base = cands.size();
      for (std::size_t i = 0; i < base; ++i) cands.push_back(measure_gap(r, fa, fb, cands[i]));
      std::sort(cands.begin(), cands.end());
      for (double c : cands) {
        if (measure_gap(r, fa, fb, c) <= c) return c;
      }
      return kInf;
    }
    case StructureKind::Curve:
      return curves_hold(r, a.as<CurveStructure>(), b.as<CurveStructure>()) ? 0.0 : kInf;
    case StructureKind::Tuple: {
      const auto &ta = a.as<TupleStructure>(), &tb = b.as<TupleStructure>();
      double worst = 0.0, cap = 1.0;
      for (std::size_t i = 0; i < ta.children.size(); ++i) {
        const double t = oracle_threshold(r, ta.children[i], tb.children[i]);
        if (ta.combinator == Combinator::Max) {
          worst = std::max(worst, t);
        } else {
          cap /= 2.0;
          worst = std::max(worst, std::min(cap, t));
        }
      }
      return worst;
    }
    case StructureKind::Absent:
      break;
  }
  return 0.0;
}

}  // namespace

DistanceResult oracle_cgf(const StructuredSpace& x, const StructuredSpace& y, std::size_t guard) {
  const std::size_t n = x.space.size(), m = y.space.size();
  if (n + m > guard || n * m > 63) throw Error(Errc::TooLarge, "oracle needs |X| + |Y| <= " + std::to_string(guard));
  if (x.origin.has_value() != y.origin.has_value()) {
    throw Error(Errc::SignatureMismatch, "only one of the spaces has an origin");
  }
  if (!comparable(x.structure, y.structure)) {
    const bool curves = x.structure.kind() == StructureKind::Curve && y.structure.kind() == StructureKind::Curve;
    throw Error(curves ? Errc::GridMismatch : Errc::SignatureMismatch,
                "structures do not match: " + signature(x.structure) + " vs " + signature(y.structure));
  }
  const std::size_t count = n * m;
  std::vector<double> gap(count * count);
  for (std::size_t p = 0; p < count; ++p) {
    for (std::size_t q = 0; q < count; ++q) {
      gap[p * count + q] = std::abs(x.space(p / m, q / m) - y.space(p % m, q % m));
    }
  }
  const std::size_t forced = x.origin ? *x.origin * m + *y.origin : count;

  double best = kInf;
  std::uint64_t best_mask = 0;
  bool found = false;
  std::vector<char> row_hit(n, 0), col_hit(m, 0);

  // Include/exclude every pair in turn.
  auto dfs = [&](auto&& self, std::size_t p, std::uint64_t mask, double dis) -> void {
    if (found && dis / 2.0 >= best) return;
    if (p == count) {
      const Rel r{m, mask};
      const double value = std::max(dis / 2.0, oracle_threshold(r, x.structure, y.structure));
      if (!found || value < best) {
        best = value;
        best_mask = mask;
        found = true;
      }
      return;
    }
    const std::size_t i = p / m, j = p % m;
    double next = dis;
    for (std::size_t q = 0; q <= p; ++q) {
      if (q == p || ((mask >> q) & 1U)) next = std::max(next, gap[p * count + q]);
    }
    const char old_row = row_hit[i], old_col = col_hit[j];
    row_hit[i] = col_hit[j] = 1;
    self(self, p + 1, mask | (std::uint64_t{1} << p), next);
    row_hit[i] = old_row;
    col_hit[j] = old_col;
    const bool row_closes = j == m - 1 && !row_hit[i];
    const bool col_closes = i == n - 1 && !col_hit[j];
    if (p != forced && !row_closes && !col_closes) self(self, p + 1, mask, dis);
  };
  dfs(dfs, 0, 0, 0.0);

  DistanceResult out{best, std::nullopt};
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t p = 0; p < count; ++p) {
    if ((best_mask >> p) & 1U) pairs.emplace_back(p / m, p % m);
  }
  out.witness = Witness{Correspondence(x.space, y.space, std::move(pairs)), {}};
  return out;
}

}  // namespace ghforge
