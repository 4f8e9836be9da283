#pragma once

// Brute-force reference for a_eps: every admissible point set S and every
// structure a' with lower <= a' <= upper is tried explicitly, and each
// candidate is scored with oracle_cgf. Measure weights are enumerated on the
// 0.25 grid, which is exact when all input weights are multiples of 0.25.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "ghforge/gh_compact.hpp"
#include "ghforge/gh_pointed.hpp"

namespace brute {

using namespace ghforge;

inline std::vector<double> quarter_steps(double lo, double hi) {
  std::vector<double> out;
  for (double w = lo; w <= hi + 1e-12; w += 0.25) out.push_back(w);
  if (out.empty() || out.back() != hi) out.push_back(hi);
  return out;
}

inline void between(const Structure& lower, const Structure& upper, const std::function<void(const Structure&)>& emit);

template <class Item, class Make>
void choose_items(const std::vector<Item>& upper, const std::vector<Item>& lower, Make make,
                  const std::function<void(const Structure&)>& emit) {
  std::vector<std::size_t> optional;
  for (std::size_t i = 0; i < upper.size(); ++i) {
    if (std::find(lower.begin(), lower.end(), upper[i]) == lower.end()) optional.push_back(i);
  }
  for (std::uint32_t mask = 0; mask < (1U << optional.size()); ++mask) {
    std::vector<Item> chosen = lower;
    for (std::size_t k = 0; k < optional.size(); ++k) {
      if ((mask >> k) & 1U) chosen.push_back(upper[optional[k]]);
    }
    emit(make(std::move(chosen)));
  }
}

inline void between(const Structure& lower, const Structure& upper, const std::function<void(const Structure&)>& emit) {
  switch (upper.kind()) {
    case StructureKind::Absent:
      emit(upper);
      return;
    case StructureKind::Point:
      if (lower.kind() == StructureKind::Absent) emit(lower);
      emit(upper);
      return;
    case StructureKind::Subset:
      choose_items(upper.as<SubsetStructure>().members, lower.as<SubsetStructure>().members,
                   [](std::vector<std::size_t> m) { return Structure::subset(std::move(m)); }, emit);
      return;
    case StructureKind::MarkedSubset: {
      const auto& u = upper.as<MarkedSubsetStructure>();
      choose_items(u.members, lower.as<MarkedSubsetStructure>().members,
                   [&](std::vector<MarkedPoint> m) { return Structure::marked_subset(u.k, u.marks, std::move(m)); },
                   emit);
      return;
    }
    case StructureKind::Measure: {
      std::vector<std::pair<std::size_t, std::vector<double>>> options;
      const auto& lw = lower.as<MeasureStructure>().weights;
      for (auto [i, w] : upper.as<MeasureStructure>().weights) {
        auto it = lw.find(i);
        options.emplace_back(i, quarter_steps(it == lw.end() ? 0.0 : it->second, w));
      }
      std::function<void(std::size_t, Weights)> rec = [&](std::size_t k, Weights acc) {
        if (k == options.size()) {
          emit(Structure::measure(acc));
          return;
        }
        for (double w : options[k].second) {
          auto next = acc;
          next[options[k].first] = w;
          rec(k + 1, next);
        }
      };
      rec(0, {});
      return;
    }
    case StructureKind::MarkedMeasure: {
      const auto& u = upper.as<MarkedMeasureStructure>();
      const auto& l = lower.as<MarkedMeasureStructure>();
      std::vector<std::vector<double>> options;
      for (const auto& a : u.atoms) {
        double lo = 0.0;
        for (const auto& b : l.atoms) {
          if (b.at == a.at) lo = b.weight;
        }
        options.push_back(quarter_steps(lo, a.weight));
      }
      std::function<void(std::size_t, std::vector<MarkedAtom>)> rec = [&](std::size_t k, std::vector<MarkedAtom> acc) {
        if (k == options.size()) {
          emit(Structure::marked_measure(u.k, u.marks, acc));
          return;
        }
        for (double w : options[k]) {
          auto next = acc;
          next.push_back({u.atoms[k].at, w});
          rec(k + 1, next);
        }
      };
      rec(0, {});
      return;
    }
    case StructureKind::Curve: {
      const auto& c = upper.as<CurveStructure>();
      std::size_t from = 0;
      if (lower.kind() == StructureKind::Curve) from = lower.as<CurveStructure>().values.size();
      if (from == 0) emit(Structure::absent());
      for (std::size_t len = std::max<std::size_t>(from, 1); len <= c.values.size(); ++len) {
        emit(Structure::curve(std::vector<double>(c.times.begin(), c.times.begin() + static_cast<std::ptrdiff_t>(len)),
                              std::vector<std::size_t>(c.values.begin(), c.values.begin() + static_cast<std::ptrdiff_t>(len))));
      }
      return;
    }
    case StructureKind::Tuple: {
      const auto& u = upper.as<TupleStructure>();
      const auto& l = lower.as<TupleStructure>();
      std::function<void(std::size_t, std::vector<Structure>)> rec = [&](std::size_t k, std::vector<Structure> acc) {
        if (k == u.children.size()) {
          emit(Structure::tuple(acc, u.combinator));
          return;
        }
        between(l.children[k], u.children[k], [&](const Structure& s) {
          auto next = acc;
          next.push_back(s);
          rec(k + 1, next);
        });
      };
      rec(0, {});
      return;
    }
  }
}

inline double a_eps(const PointedStructuredSpace& m, const PointedStructuredSpace& n, double outer, double inner,
                    bool keep_lower = true) {
  const auto left = pcball(m, outer, GravePolicy::Absent).as_structured();
  std::vector<std::size_t> core, optional;
  for (std::size_t i = 0; i < n.space.size(); ++i) (n.space(n.origin, i) <= inner ? core : optional).push_back(i);
  const auto core_emb = IsometricEmbedding::inclusion(n.space, core);
  const auto core_structure = truncate(n.structure, core_emb, GravePolicy::Absent);
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1U << optional.size()); ++mask) {
    std::vector<std::size_t> support = core;
    for (std::size_t k = 0; k < optional.size(); ++k) {
      if ((mask >> k) & 1U) support.push_back(optional[k]);
    }
    std::sort(support.begin(), support.end());
    const auto inc = IsometricEmbedding::inclusion(n.space, support);
    const auto upper = truncate(n.structure, inc, GravePolicy::Absent);
    Structure lower = bottom(upper);
    if (keep_lower) {
      std::vector<std::size_t> map;
      for (auto i : core) map.push_back(*inc.preimage(i));
      lower = pushforward(core_structure, IsometricEmbedding(core_emb.source(), inc.source(), map));
    }
    const std::size_t origin = *inc.preimage(n.origin);
    between(lower, upper, [&](const Structure& a) {
      best = std::min(best, oracle_cgf(left, StructuredSpace(inc.source(), a, origin), 12).value);
    });
  }
  return best;
}

/// First eps on the grid k * step (k = 1, 2, ...) at which both directions
/// of a_eps are below eps / 2; 1 if none.
inline double pointed_on_grid(const PointedStructuredSpace& m, const PointedStructuredSpace& n, double step) {
  const auto steps = static_cast<std::size_t>(std::llround(1.0 / step));
  for (std::size_t k = 1; k <= steps; ++k) {
    const double eps = static_cast<double>(k) / static_cast<double>(steps);
    const double outer = 1.0 / eps, inner = 1.0 / eps - eps;
    if (a_eps(m, n, outer, inner) < eps / 2.0 && a_eps(n, m, outer, inner) < eps / 2.0) return eps;
  }
  return 1.0;
}

}  // namespace brute
