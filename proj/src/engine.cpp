#include "engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <vector>

namespace ghforge::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class CliqueSearch {
 public:
  CliqueSearch(const FiniteMetricSpace& left, const FiniteMetricSpace& right, const Matcher& matcher,
               std::optional<std::pair<std::size_t, std::size_t>> forced)
      : left_(left), right_(right), matcher_(matcher), n_(left.size()), m_(right.size()), count_(n_ * m_) {
    gap_.resize(count_ * count_);
    levels_.push_back(0.0);
    for (std::size_t p = 0; p < count_; ++p) {
      for (std::size_t q = 0; q < count_; ++q) {
        const double g = std::abs(left_(p / m_, q / m_) - right_(p % m_, q % m_));
        gap_[p * count_ + q] = g;
        levels_.push_back(g);
      }
    }
    std::sort(levels_.begin(), levels_.end());
    levels_.erase(std::unique(levels_.begin(), levels_.end()), levels_.end());
    for (std::size_t i = 0; i < n_; ++i) {
      std::uint64_t row = 0;
      for (std::size_t j = 0; j < m_; ++j) row |= bit(i * m_ + j);
      rows_.push_back(row);
    }
    for (std::size_t j = 0; j < m_; ++j) {
      std::uint64_t col = 0;
      for (std::size_t i = 0; i < n_; ++i) col |= bit(i * m_ + j);
      cols_.push_back(col);
    }
    if (forced) forced_ = static_cast<int>(forced->first * m_ + forced->second);
    best_.assign(levels_.size(), std::nullopt);
  }

  std::size_t level_count() const { return levels_.size(); }
  double level(std::size_t j) const { return levels_[j]; }

  struct Best {
    double value;
    std::uint64_t clique;
  };

  // Least threshold over the correspondences of distortion <= levels_[j].
  const Best& best_at(std::size_t j) {
    if (!best_[j]) {
      const double delta = levels_[j];
      adj_.assign(count_, 0);
      for (std::size_t p = 0; p < count_; ++p) {
        for (std::size_t q = 0; q < count_; ++q) {
          if (p != q && gap_[p * count_ + q] <= delta) adj_[p] |= bit(q);
        }
      }
      current_ = Best{kInf, 0};
      const std::uint64_t all = count_ == 64 ? ~std::uint64_t{0} : (bit(count_) - 1);
      if (forced_ >= 0) {
        const auto f = static_cast<std::size_t>(forced_);
        expand(bit(f), adj_[f], 0);
      } else {
        expand(0, all, 0);
      }
      best_[j] = current_;
    }
    return *best_[j];
  }

  Relation relation_of(std::uint64_t clique) const {
    Relation r(n_, m_);
    for (std::size_t p = 0; p < count_; ++p) {
      if (clique & bit(p)) r.member[p] = 1;
    }
    return r;
  }

 private:
  static std::uint64_t bit(std::size_t p) { return std::uint64_t{1} << p; }

  bool covers(std::uint64_t s) const {
    for (auto row : rows_) {
      if (!(s & row)) return false;
    }
    for (auto col : cols_) {
      if (!(s & col)) return false;
    }
    return true;
  }

  // Bron-Kerbosch with pivoting.
  void expand(std::uint64_t r, std::uint64_t p, std::uint64_t x) {
    if (current_.value == 0.0) return;
    if (!covers(r | p)) return;
    if (!p) {
      if (!x) consider(r);
      return;
    }
    std::uint64_t both = p | x;
    std::size_t pivot = 0;
    int most = -1;
    while (both) {
      const auto u = static_cast<std::size_t>(std::countr_zero(both));
      both &= both - 1;
      const int c = std::popcount(p & adj_[u]);
      if (c > most) {
        most = c;
        pivot = u;
      }
    }
    std::uint64_t cand = p & ~adj_[pivot];
    while (cand) {
      const auto v = static_cast<std::size_t>(std::countr_zero(cand));
      cand &= cand - 1;
      expand(r | bit(v), p & adj_[v], x & adj_[v]);
      p &= ~bit(v);
      x |= bit(v);
    }
  }

  void consider(std::uint64_t clique) {
    auto it = cache_.find(clique);
    double t;
    if (it != cache_.end()) {
      t = it->second;
    } else {
      t = matcher_.threshold(relation_of(clique));
      cache_.emplace(clique, t);
    }
    if (t < current_.value) current_ = Best{t, clique};
  }

  const FiniteMetricSpace& left_;
  const FiniteMetricSpace& right_;
  const Matcher& matcher_;
  std::size_t n_, m_, count_;
  std::vector<double> gap_;
  std::vector<double> levels_;
  std::vector<std::uint64_t> rows_, cols_, adj_;
  int forced_ = -1;
  std::vector<std::optional<Best>> best_;
  Best current_{kInf, 0};
  std::unordered_map<std::uint64_t, double> cache_;
};

}  // namespace

EngineResult solve_correspondences(const FiniteMetricSpace& left, const FiniteMetricSpace& right,
                                   const Matcher& matcher, std::optional<std::pair<std::size_t, std::size_t>> forced,
                                   std::size_t guard) {
  if (left.size() + right.size() > guard) {
    throw Error(Errc::TooLarge, "correspondence search needs |X| + |Y| <= " + std::to_string(guard));
  }
  if (left.size() * right.size() > 64) {
    throw Error(Errc::TooLarge, "correspondence search needs |X| * |Y| <= 64");
  }
  CliqueSearch search(left, right, matcher, forced);
  const std::size_t levels = search.level_count();
  auto ok = [&](std::size_t j) { return search.best_at(j).value <= search.level(j) / 2.0; };

  auto result_at = [&](std::size_t j, double value) {
    const auto& b = search.best_at(j);
    EngineResult out{value, std::nullopt};
    if (b.value < kInf) out.relation = search.relation_of(b.clique);
    return out;
  };

  if (!ok(levels - 1)) {
    const auto& b = search.best_at(levels - 1);
    return result_at(levels - 1, b.value);
  }
  std::size_t lo = 0, hi = levels - 1;  // ok(hi) holds
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (ok(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  if (lo == 0) return result_at(0, 0.0);
  const double here = search.level(lo) / 2.0;
  const double before = search.best_at(lo - 1).value;
  return before < here ? result_at(lo - 1, before) : result_at(lo, here);
}

}  // namespace ghforge::detail
