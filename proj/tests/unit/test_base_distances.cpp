#include <cmath>
#include <limits>
#include <set>

#include "../support/generators.hpp"
#include "doctest.h"
#include "ghforge/base_distances.hpp"

using namespace ghforge;

namespace {

struct MinDiscrepancyCase {
  std::vector<double> mu, nu;
  std::vector<IndexPair> allowed;
  double value;
};

struct ProkhorovCase {
  Matrix d;
  std::vector<double> mu, nu;
  double value;
};

#include "../oracles/cases.inc"

FiniteMetricSpace discrete(std::size_t n) {
  Matrix m(n, std::vector<double>(n, 1.0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 0;
  return FiniteMetricSpace::from_matrix(m);
}

Weights weights_of(const std::vector<double>& w) {
  Weights out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] > 0) out[i] = w[i];
  }
  return out;
}

const auto kTwo = FiniteMetricSpace::from_matrix({{0, 2}, {2, 0}});

}  // namespace

TEST_CASE("hausdorff examples") {
  const std::vector<std::size_t> a{0}, ab{0, 1}, none{};
  CHECK(hausdorff_distance(kTwo, ab, ab) == 0);
  CHECK(hausdorff_distance(kTwo, a, ab) == 2);
  CHECK(hausdorff_distance(kTwo, none, a) == std::numeric_limits<double>::infinity());
  CHECK(hausdorff_distance(kTwo, none, none) == 0);
}

TEST_CASE("hausdorff is a metric on nonempty subsets") {
  gen::Rng rng(3);
  for (int t = 0; t < 60; ++t) {
    const auto host = gen::random_planar(rng, gen::uniform(rng, 1, 8));
    auto pick = [&] {
      auto m = gen::random_members(rng, host.size());
      if (m.empty()) m.push_back(0);
      return m;
    };
    const auto a = pick(), b = pick(), c = pick();
    CHECK(hausdorff_distance(host, a, a) == 0);
    CHECK(hausdorff_distance(host, a, b) == hausdorff_distance(host, b, a));
    CHECK(hausdorff_distance(host, a, c) <= hausdorff_distance(host, a, b) + hausdorff_distance(host, b, c) + 1e-12);
    if (a != b) CHECK(hausdorff_distance(host, a, b) > 0);
  }
}

TEST_CASE("total variation examples") {
  const FiniteMeasure mu(kTwo, {{0, 1.0}});
  CHECK(total_variation(mu, mu) == 0);
  CHECK(total_variation(mu, FiniteMeasure(kTwo, {{0, 0.4}})) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(total_variation(FiniteMeasure(kTwo, {{0, 1.0}, {1, 0.0}}), FiniteMeasure(kTwo, {{0, 0.0}, {1, 2.0}})) == 2);
}

TEST_CASE("discrepancy examples") {
  const FiniteMeasure mu(kTwo, {{0, 1.0}});
  const FiniteMeasure nu(kTwo, {{1, 1.0}});
  CHECK(discrepancy(Coupling(kTwo, kTwo, {{{0, 1}, 1.0}}), mu, nu) == 0);
  CHECK(discrepancy(Coupling(kTwo, kTwo, {}), mu, FiniteMeasure(kTwo, {{1, 2.0}})) == 3);
  const FiniteMeasure spread(kTwo, {{0, 0.5}, {1, 0.5}});
  CHECK(discrepancy(Coupling(kTwo, kTwo, {{{0, 0}, 0.5}, {{1, 1}, 0.5}}), spread, spread) == 0);
}

TEST_CASE("prokhorov examples") {
  const auto host = FiniteMetricSpace::from_matrix({{0, 0.3}, {0.3, 0}});
  const FiniteMeasure a(host, {{0, 1.0}});
  CHECK(prokhorov_distance(a, a) == 0);
  CHECK(prokhorov_distance(a, FiniteMeasure(host, {{1, 1.0}})) == 0.3);
  CHECK(prokhorov_distance(a, FiniteMeasure(host, {{0, 2.0}})) == 1);
  CHECK(prokhorov_by_coupling(a, FiniteMeasure(host, {{0, 2.0}})) == 1);
  CHECK(prokhorov_distance(FiniteMeasure(host, {}), FiniteMeasure(host, {})) == 0);
  CHECK(prokhorov_distance(FiniteMeasure(host, {}), FiniteMeasure(host, {{1, 0.25}})) == 0.25);
}

TEST_CASE("prokhorov against the subset definition") {
  for (const auto& c : kProkhorovCases) {
    const auto host = FiniteMetricSpace::from_matrix(c.d);
    const FiniteMeasure mu(host, weights_of(c.mu)), nu(host, weights_of(c.nu));
    CHECK(std::fabs(prokhorov_distance(mu, nu) - c.value) <= 1e-9);
    CHECK(std::fabs(prokhorov_by_coupling(mu, nu) - c.value) <= 1e-9);
  }
}

TEST_CASE("prokhorov guard") {
  gen::Rng rng(5);
  const auto host = gen::random_planar(rng, 14);
  Weights w;
  for (std::size_t i = 0; i < 14; ++i) w[i] = 0.1;
  const FiniteMeasure mu(host, w), nu(host, {{0, 1.0}});
  CHECK_THROWS_AS(prokhorov_distance(mu, nu, {.subset_guard = 12, .coupling_fallback = false}), Error);
  CHECK(prokhorov_distance(mu, nu) == prokhorov_by_coupling(mu, nu));
}

TEST_CASE("min discrepancy examples") {
  const FiniteMeasure a(kTwo, {{0, 1.0}});
  const FiniteMeasure b(kTwo, {{1, 1.0}});
  CHECK(min_discrepancy_outside(a, b, {{0, 1}}).value == 0);
  CHECK(min_discrepancy_outside(a, a, {{0, 0}, {1, 1}}).value == 0);
  // Moving the unit across a forbidden pair costs 1; dropping both sides costs 2.
  const auto blocked = min_discrepancy_outside(a, b, {});
  CHECK(blocked.value == 1);
  CHECK(blocked.transported == 0);
  CHECK(discrepancy(blocked.witness, a, b) + blocked.witness.mass_outside({}) == 1);
}

TEST_CASE("min discrepancy against a linear program") {
  for (const auto& c : kMinDiscrepancyCases) {
    const auto left = discrete(c.mu.size()), right = discrete(c.nu.size());
    const FiniteMeasure mu(left, weights_of(c.mu)), nu(right, weights_of(c.nu));
    const std::set<IndexPair> allowed(c.allowed.begin(), c.allowed.end());
    const auto r = min_discrepancy_outside(mu, nu, allowed);
    CHECK(std::fabs(r.value - c.value) <= 1e-8);
    CHECK(std::fabs(discrepancy(r.witness, mu, nu) + r.witness.mass_outside(allowed) - r.value) <= 1e-12);
  }
}

TEST_CASE("min discrepancy is monotone and gives prokhorov through the coupling form") {
  gen::Rng rng(13);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int t = 0; t < 60; ++t) {
    const auto host = gen::random_planar(rng, gen::uniform(rng, 1, 6));
    Weights a, b;
    for (std::size_t i = 0; i < host.size(); ++i) {
      if (gen::coin(rng, 0.6)) a[i] = u(rng);
      if (gen::coin(rng, 0.6)) b[i] = u(rng);
    }
    const FiniteMeasure mu(host, a), nu(host, b);

    std::vector<double> cuts{0.0};
    for (std::size_t i = 0; i < host.size(); ++i) {
      for (std::size_t j = 0; j < host.size(); ++j) cuts.push_back(host(i, j));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    auto allowed_at = [&](double eps) {
      std::set<IndexPair> s;
      for (std::size_t i = 0; i < host.size(); ++i) {
        for (std::size_t j = 0; j < host.size(); ++j) {
          if (host(i, j) <= eps) s.emplace(i, j);
        }
      }
      return s;
    };
    double previous = std::numeric_limits<double>::infinity();
    std::vector<double> candidates(cuts);
    for (double c : cuts) {
      const double v = min_discrepancy_outside(mu, nu, allowed_at(c)).value;
      CHECK(v <= previous + 1e-12);
      previous = v;
      candidates.push_back(v);
    }
    std::sort(candidates.begin(), candidates.end());
    double strassen = std::numeric_limits<double>::infinity();
    for (double c : candidates) {
      if (min_discrepancy_outside(mu, nu, allowed_at(c)).value <= c + 1e-12) {
        strassen = c;
        break;
      }
    }
    CHECK(std::fabs(prokhorov_distance(mu, nu) - strassen) <= 1e-9);
  }
}
