#include <random>

#include "../support/generators.hpp"
#include "doctest.h"
#include "ghforge/metric_space.hpp"

using namespace ghforge;

namespace {

Errc code_of(const Matrix& m) {
  try {
    validate_metric(m);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::InvalidArgument;
}

FiniteMetricSpace line3() { return FiniteMetricSpace::from_matrix({{0, 1, 2}, {1, 0, 1}, {2, 1, 0}}); }

}  // namespace

TEST_CASE("metric validation") {
  CHECK(validate_metric({{0, 1}, {1, 0}}).size() == 2);
  CHECK(code_of({{0, 1}, {2, 0}}) == Errc::AsymmetricMatrix);
  CHECK(code_of({{1, 1}, {1, 0}}) == Errc::NonzeroDiagonal);
  CHECK(code_of({{0, 0}, {0, 0}}) == Errc::NonpositiveDistance);
  CHECK(code_of({{0, 1}, {1}}) == Errc::InvalidArgument);

  try {
    validate_metric({{0, 1, 3}, {1, 0, 1}, {3, 1, 0}});
    FAIL("triangle violation accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TriangleViolation);
    REQUIRE(e.indices().size() == 3);
    CHECK(e.indices()[0] == 0);
    CHECK(e.indices()[1] == 2);
    CHECK(e.indices()[2] == 1);
  }
}

TEST_CASE("labels and subspaces") {
  const auto x = FiniteMetricSpace::from_matrix({"a", "b", "c"}, line3().matrix());
  CHECK(x.index_of("b") == 1);
  CHECK_FALSE(x.index_of("z"));
  CHECK(x.diameter() == 2);
  const std::vector<std::size_t> idx{2, 0};
  const auto sub = x.subspace(idx);
  CHECK(sub.label(0) == "c");
  CHECK(sub(0, 1) == 2);
  CHECK(x.scaled(0.5)(0, 2) == 1);
  CHECK_THROWS_AS(FiniteMetricSpace::from_matrix({"a", "a"}, {{0, 1}, {1, 0}}), Error);
}

TEST_CASE("distortion examples") {
  const auto x = line3();
  CHECK(distortion(Correspondence::graph(IsometricEmbedding::identity(x))) == 0);

  const auto pq = FiniteMetricSpace::from_matrix({{0, 2}, {2, 0}});
  const auto one = FiniteMetricSpace::from_matrix({{0}});
  CHECK(distortion(Correspondence(pq, one, {{0, 0}, {1, 0}})) == 2);

  const auto bent = FiniteMetricSpace::from_matrix({{0, 1, 1.5}, {1, 0, 1}, {1.5, 1, 0}});
  CHECK(distortion(Correspondence(x, bent, {{0, 0}, {1, 1}, {2, 2}})) == 0.5);

  CHECK_THROWS_AS(Correspondence(pq, one, {{0, 0}}), Error);
}

TEST_CASE("closed balls") {
  const PointedSpace p(line3(), 0);
  CHECK(closed_ball(p, 5).space.size() == 3);
  CHECK(closed_ball(p, 5).inclusion.is_bijective());
  const auto zero = closed_ball(p, 0);
  CHECK(zero.space.size() == 1);
  CHECK(zero.origin == 0);
  CHECK(closed_ball(p, 1.5).space.size() == 2);
  CHECK(closed_ball(PointedSpace(line3(), 1), 1).space.size() == 3);
}

TEST_CASE("correspondence enumeration") {
  auto pts = [](std::size_t n) {
    Matrix m(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 0;
    return FiniteMetricSpace::from_matrix(m);
  };
  CHECK(enumerate_correspondences(pts(1), pts(1)).size() == 1);
  CHECK(enumerate_correspondences(pts(1), pts(2)).size() == 1);
  CHECK(enumerate_correspondences(pts(2), pts(2)).size() == 7);
  // rows and columns both covered in a 2x3 grid: 25
  CHECK(enumerate_correspondences(pts(2), pts(3)).size() == 25);
  CHECK_THROWS_AS(enumerate_correspondences(pts(7), pts(7)), Error);
}

TEST_CASE("isomorphism search") {
  const auto x = line3();
  auto id = find_isomorphism(x, x);
  REQUIRE(id);
  CHECK(id->map() == std::vector<std::size_t>{0, 1, 2});

  const auto y = FiniteMetricSpace::from_matrix({{0, 1, 1}, {1, 0, 2}, {1, 2, 0}});
  auto perm = find_isomorphism(x, y);
  REQUIRE(perm);
  CHECK((*perm)(1) == 0);

  CHECK_FALSE(find_isomorphism(FiniteMetricSpace::from_matrix({{0, 1}, {1, 0}}),
                               FiniteMetricSpace::from_matrix({{0, 2}, {2, 0}})));

  std::size_t count = 0;
  for_each_isometry(x, x, [&](const std::vector<std::size_t>&) {
    ++count;
    return true;
  });
  CHECK(count == 2);
}

TEST_CASE("isometric embeddings") {
  const auto x = line3();
  const auto inc = IsometricEmbedding::inclusion(x, {0, 2});
  CHECK(inc.source()(0, 1) == 2);
  CHECK(inc.preimage(2) == 1);
  CHECK_FALSE(inc.preimage(1));
  CHECK_THROWS_AS(IsometricEmbedding(x, x, {0, 0, 1}), Error);
  CHECK_THROWS_AS(IsometricEmbedding(x, x, {1, 0, 2}), Error);
  const auto twice = compose(inc, IsometricEmbedding::identity(x));
  CHECK(twice.map() == inc.map());
}

TEST_CASE("graphs of isometries have zero distortion") {
  gen::Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    const auto x = gen::random_space(rng, gen::uniform(rng, 1, 6));
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const auto y = gen::permuted(StructuredSpace(x, Structure::none()), order).space;
    auto f = find_isomorphism(x, y);
    REQUIRE(f);
    CHECK(distortion(Correspondence::graph(*f)) == 0);
  }
}
