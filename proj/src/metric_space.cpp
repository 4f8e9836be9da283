#include "ghforge/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <unordered_set>

namespace ghforge {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::AsymmetricMatrix: return "AsymmetricMatrix";
    case Errc::NonzeroDiagonal: return "NonzeroDiagonal";
    case Errc::NonpositiveDistance: return "NonpositiveDistance";
    case Errc::TriangleViolation: return "TriangleViolation";
    case Errc::TooLarge: return "TooLarge";
    case Errc::HostMismatch: return "HostMismatch";
    case Errc::KindMismatch: return "KindMismatch";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::OutOfBall: return "OutOfBall";
    case Errc::SignatureMismatch: return "SignatureMismatch";
    case Errc::SchemaError: return "SchemaError";
    case Errc::DanglingLabel: return "DanglingLabel";
  }
  return "Unknown";
}

namespace {

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

}  // namespace

FiniteMetricSpace FiniteMetricSpace::from_matrix(std::vector<std::string> labels, const Matrix& matrix,
                                                 double triangle_tol) {
  const std::size_t n = matrix.size();
  if (n == 0) throw Error(Errc::InvalidArgument, "a metric space needs at least one point");
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix[i].size() != n) throw Error(Errc::InvalidArgument, "distance matrix is not square", {i});
  }
  if (labels.size() != n) throw Error(Errc::InvalidArgument, "label count does not match matrix size");
  {
    std::unordered_set<std::string> seen;
    for (const auto& l : labels) {
      if (!seen.insert(l).second) throw Error(Errc::InvalidArgument, "duplicate label '" + l + "'");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(matrix[i][j])) {
        throw Error(Errc::InvalidArgument, "non-finite distance", {i, j});
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix[i][i] != 0.0) {
      throw Error(Errc::NonzeroDiagonal, "d(" + labels[i] + "," + labels[i] + ") != 0", {i, i});
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (matrix[i][j] != matrix[j][i]) {
        throw Error(Errc::AsymmetricMatrix, "d(" + labels[i] + "," + labels[j] + ") != d(" + labels[j] + "," +
                                                labels[i] + ")",
                    {i, j});
      }
      if (!(matrix[i][j] > 0.0)) {
        throw Error(Errc::NonpositiveDistance, "d(" + labels[i] + "," + labels[j] + ") must be positive", {i, j});
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        if (matrix[i][k] > matrix[i][j] + matrix[j][k] + triangle_tol) {
          std::ostringstream msg;
          msg << "d(" << labels[i] << "," << labels[k] << ")=" << matrix[i][k] << " exceeds the path via "
              << labels[j] << " (" << matrix[i][j] + matrix[j][k] << ")";
          throw Error(Errc::TriangleViolation, msg.str(), {i, k, j});
        }
      }
    }
  }

  auto data = std::make_shared<Data>();
  data->labels = std::move(labels);
  data->n = n;
  data->dist.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) data->dist[i * n + j] = matrix[i][j];
  }
  return FiniteMetricSpace(std::move(data));
}

FiniteMetricSpace FiniteMetricSpace::from_matrix(const Matrix& matrix, double triangle_tol) {
  return from_matrix(default_labels(matrix.size()), matrix, triangle_tol);
}

FiniteMetricSpace validate_metric(const Matrix& matrix, double triangle_tol) {
  return FiniteMetricSpace::from_matrix(matrix, triangle_tol);
}

std::optional<std::size_t> FiniteMetricSpace::index_of(std::string_view label) const {
  const auto& ls = data_->labels;
  auto it = std::find(ls.begin(), ls.end(), label);
  if (it == ls.end()) return std::nullopt;
  return static_cast<std::size_t>(it - ls.begin());
}

double FiniteMetricSpace::diameter() const noexcept {
  double best = 0.0;
  for (double d : data_->dist) best = std::max(best, d);
  return best;
}

Matrix FiniteMetricSpace::matrix() const {
  const std::size_t n = size();
  Matrix m(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = distance(i, j);
  }
  return m;
}

FiniteMetricSpace FiniteMetricSpace::subspace(std::span<const std::size_t> indices) const {
  if (indices.empty()) throw Error(Errc::InvalidArgument, "subspace needs at least one point");
  auto data = std::make_shared<Data>();
  data->n = indices.size();
  data->dist.resize(data->n * data->n);
  std::vector<char> used(size(), 0);
  for (std::size_t a = 0; a < indices.size(); ++a) {
    if (indices[a] >= size()) throw Error(Errc::InvalidArgument, "subspace index out of range", {indices[a]});
    if (used[indices[a]]) throw Error(Errc::InvalidArgument, "subspace index repeated", {indices[a]});
    used[indices[a]] = 1;
    data->labels.push_back(label(indices[a]));
    for (std::size_t b = 0; b < indices.size(); ++b) {
      data->dist[a * data->n + b] = distance(indices[a], indices[b]);
    }
  }
  return FiniteMetricSpace(std::move(data));
}

FiniteMetricSpace FiniteMetricSpace::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw Error(Errc::InvalidArgument, "scale factor must be positive");
  auto data = std::make_shared<Data>(*data_);
  for (double& d : data->dist) d *= factor;
  return FiniteMetricSpace(std::move(data));
}

bool operator==(const FiniteMetricSpace& a, const FiniteMetricSpace& b) {
  if (a.data_ == b.data_) return true;
  return a.data_->labels == b.data_->labels && a.data_->dist == b.data_->dist;
}

PointedSpace::PointedSpace(FiniteMetricSpace s, std::size_t o) : space(std::move(s)), origin(o) {
  if (origin >= space.size()) throw Error(Errc::InvalidArgument, "origin index out of range", {origin});
}

// ---------------------------------------------------------------------------

IsometricEmbedding::IsometricEmbedding(FiniteMetricSpace source, FiniteMetricSpace target,
                                       std::vector<std::size_t> map)
    : source_(std::move(source)), target_(std::move(target)), map_(std::move(map)) {
  if (map_.size() != source_.size()) throw Error(Errc::InvalidArgument, "embedding map has the wrong length");
  inverse_.assign(target_.size(), -1);
  for (std::size_t i = 0; i < map_.size(); ++i) {
    if (map_[i] >= target_.size()) throw Error(Errc::InvalidArgument, "embedding maps outside the target", {i});
    if (inverse_[map_[i]] >= 0) throw Error(Errc::InvalidArgument, "embedding is not injective", {i});
    inverse_[map_[i]] = static_cast<std::ptrdiff_t>(i);
  }
  for (std::size_t i = 0; i < map_.size(); ++i) {
    for (std::size_t j = i + 1; j < map_.size(); ++j) {
      if (source_.distance(i, j) != target_.distance(map_[i], map_[j])) {
        throw Error(Errc::InvalidArgument, "map does not preserve d(" + source_.label(i) + "," + source_.label(j) + ")",
                    {i, j});
      }
    }
  }
}

IsometricEmbedding IsometricEmbedding::identity(const FiniteMetricSpace& space) {
  std::vector<std::size_t> map(space.size());
  for (std::size_t i = 0; i < map.size(); ++i) map[i] = i;
  return IsometricEmbedding(space, space, std::move(map));
}

IsometricEmbedding IsometricEmbedding::inclusion(const FiniteMetricSpace& host, std::vector<std::size_t> indices) {
  auto sub = host.subspace(indices);
  return IsometricEmbedding(std::move(sub), host, std::move(indices));
}

std::optional<std::size_t> IsometricEmbedding::preimage(std::size_t j) const {
  if (j >= inverse_.size() || inverse_[j] < 0) return std::nullopt;
  return static_cast<std::size_t>(inverse_[j]);
}

IsometricEmbedding compose(const IsometricEmbedding& first, const IsometricEmbedding& second) {
  if (!(first.target() == second.source())) {
    throw Error(Errc::HostMismatch, "cannot compose embeddings: target and source differ");
  }
  std::vector<std::size_t> map(first.map().size());
  for (std::size_t i = 0; i < map.size(); ++i) map[i] = second(first(i));
  return IsometricEmbedding(first.source(), second.target(), std::move(map));
}

Ball closed_ball(const PointedSpace& pointed, double radius) {
  const auto& s = pointed.space;
  std::vector<std::size_t> inside;
  std::size_t origin_pos = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i == pointed.origin || s.distance(pointed.origin, i) <= radius) {
      if (i == pointed.origin) origin_pos = inside.size();
      inside.push_back(i);
    }
  }
  auto inclusion = IsometricEmbedding::inclusion(s, std::move(inside));
  auto sub = inclusion.source();
  return Ball{std::move(sub), std::move(inclusion), origin_pos};
}

// ---------------------------------------------------------------------------

Correspondence::Correspondence(FiniteMetricSpace left, FiniteMetricSpace right,
                               std::vector<std::pair<std::size_t, std::size_t>> pairs)
    : left_(std::move(left)), right_(std::move(right)), pairs_(std::move(pairs)) {
  const std::size_t n = left_.size(), m = right_.size();
  std::sort(pairs_.begin(), pairs_.end());
  pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
  member_.assign(n * m, 0);
  std::vector<char> row(n, 0), col(m, 0);
  for (auto [i, j] : pairs_) {
    if (i >= n || j >= m) throw Error(Errc::InvalidArgument, "correspondence pair out of range", {i, j});
    member_[i * m + j] = 1;
    row[i] = 1;
    col[j] = 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!row[i]) throw Error(Errc::InvalidArgument, "left point " + left_.label(i) + " is unmatched", {i});
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!col[j]) throw Error(Errc::InvalidArgument, "right point " + right_.label(j) + " is unmatched", {j});
  }
}

Correspondence Correspondence::graph(const IsometricEmbedding& bijection) {
  if (!bijection.is_bijective()) throw Error(Errc::InvalidArgument, "graph() needs a bijection");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < bijection.map().size(); ++i) pairs.emplace_back(i, bijection(i));
  return Correspondence(bijection.source(), bijection.target(), std::move(pairs));
}

double distortion(const Correspondence& relation) {
  const auto& ps = relation.pairs();
  const auto& x = relation.left();
  const auto& y = relation.right();
  double worst = 0.0;
  for (std::size_t a = 0; a < ps.size(); ++a) {
    for (std::size_t b = a + 1; b < ps.size(); ++b) {
      worst = std::max(worst, std::abs(x(ps[a].first, ps[b].first) - y(ps[a].second, ps[b].second)));
    }
  }
  return worst;
}

void for_each_correspondence(const FiniteMetricSpace& left, const FiniteMetricSpace& right,
                             const std::function<void(const Correspondence&)>& visit, std::size_t guard) {
  const std::size_t n = left.size(), m = right.size();
  if (n + m > guard || n * m > 62) {
    throw Error(Errc::TooLarge, "correspondence enumeration over " + std::to_string(n) + "+" + std::to_string(m) +
                                    " points exceeds the guard of " + std::to_string(guard));
  }
  const std::uint64_t cells = static_cast<std::uint64_t>(n * m);
  std::uint64_t row_mask = 0;
  for (std::size_t j = 0; j < m; ++j) row_mask |= std::uint64_t{1} << j;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << cells); ++mask) {
    std::uint64_t cols = 0;
    bool rows_ok = true;
    for (std::size_t i = 0; i < n && rows_ok; ++i) {
      const std::uint64_t row = (mask >> (i * m)) & row_mask;
      rows_ok = row != 0;
      cols |= row;
    }
    if (!rows_ok || cols != row_mask) continue;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t c = 0; c < cells; ++c) {
      if (mask >> c & 1U) pairs.emplace_back(c / m, c % m);
    }
    visit(Correspondence(left, right, std::move(pairs)));
  }
}

std::vector<Correspondence> enumerate_correspondences(const FiniteMetricSpace& left, const FiniteMetricSpace& right,
                                                      std::size_t guard) {
  std::vector<Correspondence> out;
  for_each_correspondence(left, right, [&](const Correspondence& r) { out.push_back(r); }, guard);
  return out;
}

void for_each_isometry(const FiniteMetricSpace& a, const FiniteMetricSpace& b,
                       const std::function<bool(const std::vector<std::size_t>&)>& visit) {
  const std::size_t n = a.size();
  if (b.size() != n) return;
  std::vector<std::size_t> map(n);
  std::vector<char> used(n, 0);
  bool stop = false;
  std::function<void(std::size_t)> extend = [&](std::size_t i) {
    if (stop) return;
    if (i == n) {
      if (!visit(map)) stop = true;
      return;
    }
    for (std::size_t j = 0; j < n && !stop; ++j) {
      if (used[j]) continue;
      bool ok = true;
      for (std::size_t p = 0; p < i && ok; ++p) ok = a(p, i) == b(map[p], j);
      if (!ok) continue;
      used[j] = 1;
      map[i] = j;
      extend(i + 1);
      used[j] = 0;
    }
  };
  extend(0);
}

std::optional<IsometricEmbedding> find_isomorphism(const FiniteMetricSpace& a, const FiniteMetricSpace& b,
                                                   std::size_t guard) {
  if (a.size() + b.size() > guard) {
    throw Error(Errc::TooLarge, "isomorphism search exceeds the guard of " + std::to_string(guard));
  }
  std::optional<std::vector<std::size_t>> found;
  for_each_isometry(a, b, [&](const std::vector<std::size_t>& map) {
    found = map;
    return false;
  });
  if (!found) return std::nullopt;
  return IsometricEmbedding(a, b, std::move(*found));
}

}  // namespace ghforge
