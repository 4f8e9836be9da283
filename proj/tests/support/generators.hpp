#pragma once

// Random instances for property tests. Distances are drawn from
// {1, 1.25, 1.5, 1.75, 2} (times a scale), so every matrix satisfies the
// triangle inequality and all values are exact in binary; weights are
// multiples of 0.25 for the same reason.

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "ghforge/gh_compact.hpp"
#include "ghforge/gh_pointed.hpp"
#include "ghforge/structure.hpp"

namespace gen {

using namespace ghforge;
using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

inline double quarter(Rng& rng, int lo, int hi) { return 0.25 * static_cast<double>(uniform(rng, lo, hi)); }

inline FiniteMetricSpace random_space(Rng& rng, std::size_t n, double scale = 1.0) {
  Matrix m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) m[i][j] = m[j][i] = scale * quarter(rng, 4, 8);
  }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("x" + std::to_string(i));
  return FiniteMetricSpace::from_matrix(labels, m);
}

/// Euclidean points in the plane with random coordinates.
inline FiniteMetricSpace random_planar(Rng& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<double, double>> p(n);
  for (auto& q : p) q = {u(rng), u(rng)};
  Matrix m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = std::hypot(p[i].first - p[j].first, p[i].second - p[j].second);
  }
  return FiniteMetricSpace::from_matrix(m);
}

inline MarkSpace random_marks(Rng& rng) {
  const std::size_t k = uniform(rng, 2, 3);
  Matrix m(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) m[i][j] = m[j][i] = 0.25 * static_cast<double>(uniform(rng, 2, 3));
  }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < k; ++i) labels.push_back("m" + std::to_string(i));
  return MarkSpace(FiniteMetricSpace::from_matrix(labels, m));
}

enum class Kind { None, Point, Measure, Subset, MarkedMeasure, MarkedSubset, Curve, PairTuple };
inline constexpr Kind kAllKinds[] = {Kind::None,          Kind::Point,        Kind::Measure, Kind::Subset,
                                     Kind::MarkedMeasure, Kind::MarkedSubset, Kind::Curve,   Kind::PairTuple};

inline Kind random_kind(Rng& rng) { return kAllKinds[uniform(rng, 0, 7)]; }

inline std::vector<std::size_t> random_members(Rng& rng, std::size_t n, double keep = 0.5) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (coin(rng, keep)) out.push_back(i);
  }
  return out;
}

inline Structure random_leaf(Rng& rng, Kind kind, std::size_t n, const MarkSpace& marks, std::size_t curve_length) {
  switch (kind) {
    case Kind::None: return Structure::none();
    case Kind::Point: return Structure::point(uniform(rng, 0, n - 1));
    case Kind::Measure: {
      Weights w;
      for (auto i : random_members(rng, n, 0.6)) w[i] = quarter(rng, 1, 4);
      return Structure::measure(std::move(w));
    }
    case Kind::Subset: {
      auto members = random_members(rng, n, 0.6);
      if (members.empty() && coin(rng, 0.8)) members.push_back(uniform(rng, 0, n - 1));
      return Structure::subset(std::move(members));
    }
    case Kind::MarkedMeasure: {
      std::vector<MarkedAtom> atoms;
      const std::size_t count = uniform(rng, 0, 3);
      for (std::size_t i = 0; i < count; ++i) {
        atoms.push_back({{{uniform(rng, 0, n - 1)}, uniform(rng, 0, marks.size() - 1)}, quarter(rng, 1, 4)});
      }
      return Structure::marked_measure(1, marks, std::move(atoms));
    }
    case Kind::MarkedSubset: {
      std::vector<MarkedPoint> members;
      const std::size_t count = uniform(rng, 1, 3);
      for (std::size_t i = 0; i < count; ++i) members.push_back({{uniform(rng, 0, n - 1)}, uniform(rng, 0, marks.size() - 1)});
      return Structure::marked_subset(1, marks, std::move(members));
    }
    case Kind::Curve: {
      const std::size_t len = curve_length ? curve_length : uniform(rng, 1, 3);
      std::vector<double> times;
      std::vector<std::size_t> values;
      for (std::size_t t = 0; t < len; ++t) {
        times.push_back(static_cast<double>(t));
        values.push_back(uniform(rng, 0, n - 1));
      }
      return Structure::curve(std::move(times), std::move(values));
    }
    case Kind::PairTuple: break;
  }
  return Structure::none();
}

inline Structure random_tuple(Rng& rng, Kind first, Kind second, std::size_t n, const MarkSpace& marks) {
  return Structure::tuple({random_leaf(rng, first, n, marks, 0), random_leaf(rng, second, n, marks, 0)});
}

inline Kind random_leaf_kind(Rng& rng) {
  static constexpr Kind leaves[] = {Kind::Point, Kind::Measure, Kind::Subset, Kind::MarkedMeasure, Kind::MarkedSubset,
                                    Kind::Curve};
  return leaves[uniform(rng, 0, 5)];
}

/// A structure kind with its mark space and tuple children fixed, so that
/// independent draws on different spaces stay comparable.
struct Shape {
  Kind kind;
  Kind first = Kind::None, second = Kind::None;
  MarkSpace marks;

  static Shape random(Rng& rng, Kind kind) {
    Shape s{kind, Kind::None, Kind::None, random_marks(rng)};
    if (kind == Kind::PairTuple) {
      s.first = random_leaf_kind(rng);
      s.second = random_leaf_kind(rng);
    }
    return s;
  }

  Structure draw(Rng& rng, std::size_t n) const {
    if (kind == Kind::PairTuple) return random_tuple(rng, first, second, n, marks);
    return random_leaf(rng, kind, n, marks, 0);
  }
};

/// The same structured space with its points listed in another order.
inline StructuredSpace permuted(const StructuredSpace& s, const std::vector<std::size_t>& order) {
  const std::size_t n = s.space.size();
  Matrix m(n, std::vector<double>(n));
  std::vector<std::string> labels(n);
  std::vector<std::size_t> map(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = s.space.label(order[i]);
    map[order[i]] = i;
    for (std::size_t j = 0; j < n; ++j) m[i][j] = s.space(order[i], order[j]);
  }
  const auto target = FiniteMetricSpace::from_matrix(labels, m);
  const IsometricEmbedding f(s.space, target, map);
  std::optional<std::size_t> origin;
  if (s.origin) origin = map[*s.origin];
  return StructuredSpace(target, pushforward(s.structure, f), origin);
}

inline StructuredSpace shuffled(Rng& rng, const StructuredSpace& s) {
  std::vector<std::size_t> order(s.space.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  return permuted(s, order);
}

inline PointedStructuredSpace shuffled(Rng& rng, const PointedStructuredSpace& s) {
  return PointedStructuredSpace(shuffled(rng, s.as_structured()));
}

}  // namespace gen
