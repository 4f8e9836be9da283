#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "ghforge/gh_compact.hpp"

namespace ghforge::detail {

/// Membership table of a relation between an n-point and an m-point space.
struct Relation {
  std::size_t n = 0, m = 0;
  std::vector<char> member;  // row-major n x m

  Relation(std::size_t n_, std::size_t m_) : n(n_), m(m_), member(n_ * m_, 0) {}
  bool has(std::size_t i, std::size_t j) const { return member[i * m + j] != 0; }
  void set(std::size_t i, std::size_t j) { member[i * m + j] = 1; }
  static Relation of(const Correspondence& r);
};

class MatchNode {
 public:
  virtual ~MatchNode() = default;
  virtual double threshold(const Relation& r) const = 0;
  virtual bool feasible(const Relation& r, double eps) const = 0;
  virtual void certify(const Relation& r, double eps, const std::string& path,
                       std::vector<Certificate>& out) const = 0;
};

/// Component tests of the correspondence characterization for a structure
/// `a` on the left space against every structure a' on the right space with
/// lower <= a' <= upper. With lower == upper this is the compact test; the
/// minimum over a' is taken inside each component.
class Matcher {
 public:
  Matcher(const FiniteMetricSpace& left, const Structure& a, const FiniteMetricSpace& right, const Structure& upper,
          const Structure& lower);
  Matcher(const FiniteMetricSpace& left, const Structure& a, const FiniteMetricSpace& right, const Structure& b)
      : Matcher(left, a, right, b, b) {}

  /// Least eps at which every component holds for r (distortion excluded).
  double threshold(const Relation& r) const { return root_->threshold(r); }
  bool feasible(const Relation& r, double eps) const { return root_->feasible(r, eps); }
  std::vector<Certificate> certify(const Relation& r, double eps) const;

 private:
  std::shared_ptr<const MatchNode> root_;
};

}  // namespace ghforge::detail
