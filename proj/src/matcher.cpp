#include "matcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "flow.hpp"

namespace ghforge::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void mismatch(const Structure& a, const Structure& b) {
  throw Error(Errc::SignatureMismatch, "structures do not match: " + signature(a) + " vs " + signature(b));
}

// A point of X^k x Xi, possibly with a weight.
struct Item {
  MarkedPoint at;
  double weight = 1.0;
};

// Pairwise data between left items and right items: the relation pairs that
// must be present for the items to correspond, and the mark distance.
struct PairTable {
  std::size_t p = 0, q = 0;
  std::vector<std::vector<std::size_t>> required;  // codes i * m + j
  std::vector<double> mark_gap;

  PairTable(const std::vector<Item>& left, const std::vector<Item>& right, const MarkSpace& marks, std::size_t m)
      : p(left.size()), q(right.size()), required(p * q), mark_gap(p * q) {
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = 0; b < q; ++b) {
        auto& req = required[a * q + b];
        for (std::size_t t = 0; t < left[a].at.points.size(); ++t) req.push_back(left[a].at.points[t] * m + right[b].at.points[t]);
        mark_gap[a * q + b] = marks.distance(left[a].at.mark, right[b].at.mark);
      }
    }
  }

  bool linked(const Relation& r, std::size_t a, std::size_t b) const {
    for (auto code : required[a * q + b]) {
      if (!r.member[code]) return false;
    }
    return true;
  }
  double gap(std::size_t a, std::size_t b) const { return mark_gap[a * q + b]; }
};

// ---------------------------------------------------------------------------
// points and (marked) subsets

class SetNode final : public MatchNode {
 public:
  SetNode(std::string kind, std::vector<Item> left, std::vector<Item> right, std::vector<char> lower,
          const MarkSpace& marks, std::size_t m)
      : kind_(std::move(kind)), lower_(std::move(lower)), table_(left, right, marks, m) {}

  double threshold(const Relation& r) const override {
    double t = 0.0;
    for (std::size_t a = 0; a < table_.p && t < kInf; ++a) t = std::max(t, best_right(r, a));
    for (std::size_t b = 0; b < table_.q && t < kInf; ++b) {
      if (lower_[b]) t = std::max(t, best_left(r, b));
    }
    return t;
  }

  bool feasible(const Relation& r, double eps) const override { return threshold(r) <= eps; }

  void certify(const Relation& r, double eps, const std::string& path, std::vector<Certificate>& out) const override {
    Certificate c{path, kind_, threshold(r), false, {}, {}};
    c.holds = c.threshold <= eps;
    for (std::size_t a = 0; a < table_.p; ++a) {
      for (std::size_t b = 0; b < table_.q; ++b) {
        if (table_.linked(r, a, b) && table_.gap(a, b) <= eps) {
          c.matches.emplace_back(a, b);
          break;
        }
      }
    }
    for (std::size_t b = 0; b < table_.q; ++b) {
      if (!lower_[b]) continue;
      for (std::size_t a = 0; a < table_.p; ++a) {
        if (table_.linked(r, a, b) && table_.gap(a, b) <= eps) {
          if (std::find(c.matches.begin(), c.matches.end(), std::pair{a, b}) == c.matches.end()) c.matches.emplace_back(a, b);
          break;
        }
      }
    }
    std::sort(c.matches.begin(), c.matches.end());
    out.push_back(std::move(c));
  }

 private:
  double best_right(const Relation& r, std::size_t a) const {
    double best = kInf;
    for (std::size_t b = 0; b < table_.q; ++b) {
      if (table_.linked(r, a, b)) best = std::min(best, table_.gap(a, b));
    }
    return best;
  }
  double best_left(const Relation& r, std::size_t b) const {
    double best = kInf;
    for (std::size_t a = 0; a < table_.p; ++a) {
      if (table_.linked(r, a, b)) best = std::min(best, table_.gap(a, b));
    }
    return best;
  }

  std::string kind_;
  std::vector<char> lower_;
  PairTable table_;
};

// ---------------------------------------------------------------------------
// (marked) measures

class MeasureNode final : public MatchNode {
 public:
  MeasureNode(std::vector<Item> left, std::vector<Item> right, std::vector<double> lower, const MarkSpace& marks,
              std::size_t m)
      : lower_(std::move(lower)), table_(left, right, marks, m) {
    for (const auto& it : left) left_.push_back(it.weight);
    for (const auto& it : right) upper_.push_back(it.weight);
    same_bounds_ = lower_ == upper_;
  }

  double threshold(const Relation& r) const override {
    std::vector<char> linked(table_.p * table_.q);
    std::vector<double> cuts{0.0};
    for (std::size_t a = 0; a < table_.p; ++a) {
      for (std::size_t b = 0; b < table_.q; ++b) {
        linked[a * table_.q + b] = table_.linked(r, a, b) ? 1 : 0;
        if (linked[a * table_.q + b]) cuts.push_back(table_.gap(a, b));
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return first_feasible(cuts, [&](double eps) { return cost(linked, eps).value; });
  }

  bool feasible(const Relation& r, double eps) const override { return cost(linked_of(r), eps).value <= eps; }

  void certify(const Relation& r, double eps, const std::string& path, std::vector<Certificate>& out) const override {
    const auto res = cost(linked_of(r), eps);
    Certificate c{path, "measure", threshold(r), res.value <= eps, {}, {}};
    for (std::size_t a = 0; a < table_.p; ++a) {
      for (std::size_t b = 0; b < table_.q; ++b) {
        const double f = res.flow[a * table_.q + b];
        if (f > 0.0) c.transport.emplace_back(a, b, f);
      }
    }
    out.push_back(std::move(c));
  }

 private:
  struct Cost {
    double value;
    std::vector<double> flow;
  };

  std::vector<char> linked_of(const Relation& r) const {
    std::vector<char> linked(table_.p * table_.q);
    for (std::size_t a = 0; a < table_.p; ++a) {
      for (std::size_t b = 0; b < table_.q; ++b) linked[a * table_.q + b] = table_.linked(r, a, b) ? 1 : 0;
    }
    return linked;
  }

  // max(mu(X) - F_upper, lower(Y) - F_lower): the least discrepancy plus
  // leakage over couplings with any a' between lower and upper.
  Cost cost(const std::vector<char>& linked, double eps) const {
    std::vector<char> allowed(linked.size());
    for (std::size_t k = 0; k < linked.size(); ++k) allowed[k] = linked[k] && table_.mark_gap[k] <= eps ? 1 : 0;
    auto up = max_bipartite_flow(left_, upper_, allowed);
    double left_excess = 0.0;
    for (double x : up.left_residual) left_excess += x;
    double right_excess = 0.0;
    if (same_bounds_) {
      for (double x : up.right_residual) right_excess += x;
    } else {
      const auto low = max_bipartite_flow(left_, lower_, allowed);
      for (double x : low.right_residual) right_excess += x;
    }
    return Cost{std::max(left_excess, right_excess), std::move(up.flow)};
  }

  std::vector<double> left_, upper_, lower_;
  bool same_bounds_ = true;
  PairTable table_;
};

// ---------------------------------------------------------------------------
// curves

struct SampledCurve {
  std::vector<double> times;
  std::vector<std::size_t> values;  // empty: absent
};

class CurveNode final : public MatchNode {
 public:
  CurveNode(SampledCurve left, SampledCurve upper, std::size_t lower_length)
      : left_(std::move(left)), upper_(std::move(upper)), lower_length_(lower_length) {}

  double threshold(const Relation& r) const override { return best_length(r) ? 0.0 : kInf; }
  bool feasible(const Relation& r, double) const override { return best_length(r).has_value(); }

  void certify(const Relation& r, double eps, const std::string& path, std::vector<Certificate>& out) const override {
    Certificate c{path, "curve", threshold(r), false, {}, {}};
    c.holds = c.threshold <= eps;
    if (auto len = best_length(r)) {
      const std::size_t la = left_.values.size();
      for (std::size_t t = 0; t < std::max(la, *len); ++t) {
        c.matches.emplace_back(left_.values[std::min(t, la - 1)], upper_.values[std::min(t, *len - 1)]);
      }
    }
    out.push_back(std::move(c));
  }

 private:
  std::optional<std::size_t> best_length(const Relation& r) const {
    for (std::size_t len = lower_length_; len <= upper_.values.size(); ++len) {
      if (works(r, len)) return len;
    }
    return std::nullopt;
  }

  bool works(const Relation& r, std::size_t len) const {
    const std::size_t la = left_.values.size();
    if (la == 0 || len == 0) return la == len;
    for (std::size_t t = 0; t < std::max(la, len); ++t) {
      if (!r.has(left_.values[std::min(t, la - 1)], upper_.values[std::min(t, len - 1)])) return false;
    }
    return true;
  }

  SampledCurve left_, upper_;
  std::size_t lower_length_;
};

// ---------------------------------------------------------------------------
// tuples

class TupleNode final : public MatchNode {
 public:
  TupleNode(std::vector<std::shared_ptr<const MatchNode>> children, Combinator combinator)
      : children_(std::move(children)), combinator_(combinator) {}

  double threshold(const Relation& r) const override {
    double t = 0.0;
    double cap = 1.0;
    for (const auto& c : children_) {
      const double x = c->threshold(r);
      if (combinator_ == Combinator::Max) {
        t = std::max(t, x);
        if (t == kInf) break;
      } else {
        cap *= 0.5;
        t = std::max(t, std::min(x, cap));
      }
    }
    return t;
  }

  bool feasible(const Relation& r, double eps) const override {
    double cap = 1.0;
    for (const auto& c : children_) {
      cap *= 0.5;
      if (combinator_ == Combinator::Weighted && cap <= eps) continue;
      if (!c->feasible(r, eps)) return false;
    }
    return true;
  }

  void certify(const Relation& r, double eps, const std::string& path, std::vector<Certificate>& out) const override {
    for (std::size_t i = 0; i < children_.size(); ++i) {
      children_[i]->certify(r, eps, path.empty() ? std::to_string(i) : path + "." + std::to_string(i), out);
    }
  }

 private:
  std::vector<std::shared_ptr<const MatchNode>> children_;
  Combinator combinator_;
};

// ---------------------------------------------------------------------------
// construction

enum class Family { Set, Measure, Curve, Tuple };

Family family_of(StructureKind k) {
  switch (k) {
    case StructureKind::Measure:
    case StructureKind::MarkedMeasure: return Family::Measure;
    case StructureKind::Curve: return Family::Curve;
    case StructureKind::Tuple: return Family::Tuple;
    default: return Family::Set;
  }
}

struct Flavour {
  std::size_t k = 1;
  MarkSpace marks = MarkSpace::trivial();
};

std::vector<Item> items_of(const Structure& s) {
  std::vector<Item> out;
  switch (s.kind()) {
    case StructureKind::Point:
      out.push_back({{{s.as<PointStructure>().index}, 0}, 1.0});
      break;
    case StructureKind::Subset:
      for (auto i : s.as<SubsetStructure>().members) out.push_back({{{i}, 0}, 1.0});
      break;
    case StructureKind::MarkedSubset:
      for (const auto& p : s.as<MarkedSubsetStructure>().members) out.push_back({p, 1.0});
      break;
    case StructureKind::Measure:
      for (auto [i, w] : s.as<MeasureStructure>().weights) out.push_back({{{i}, 0}, w});
      break;
    case StructureKind::MarkedMeasure:
      for (const auto& a : s.as<MarkedMeasureStructure>().atoms) out.push_back({a.at, a.weight});
      break;
    default:
      break;
  }
  return out;
}

std::optional<Flavour> flavour_of(const Structure& s) {
  if (s.kind() == StructureKind::MarkedSubset) {
    const auto& m = s.as<MarkedSubsetStructure>();
    return Flavour{m.k, m.marks};
  }
  if (s.kind() == StructureKind::MarkedMeasure) {
    const auto& m = s.as<MarkedMeasureStructure>();
    return Flavour{m.k, m.marks};
  }
  return std::nullopt;
}

SampledCurve curve_of(const Structure& s) {
  if (s.kind() == StructureKind::Curve) {
    const auto& c = s.as<CurveStructure>();
    return {c.times, c.values};
  }
  return {};
}

std::shared_ptr<const MatchNode> build(const Structure& a, const Structure& upper, const Structure& lower,
                                       std::size_t m) {
  const Structure* all[] = {&a, &upper, &lower};
  // Absent leaves take the family of whatever they are compared with.
  std::optional<Family> fam;
  for (const auto* s : all) {
    if (s->kind() == StructureKind::Absent) continue;
    const Family f = family_of(s->kind());
    if (fam && *fam != f) mismatch(a, upper);
    fam = f;
  }
  if (!fam) fam = Family::Set;

  for (const auto* s : all) {
    if (s->kind() == StructureKind::Absent) {
      if (*fam == Family::Set) {
        for (const auto* t : all) {
          if (t->kind() != StructureKind::Absent && t->kind() != StructureKind::Point) mismatch(a, upper);
        }
      } else if (*fam != Family::Curve) {
        mismatch(a, upper);
      }
    }
  }

  switch (*fam) {
    case Family::Tuple: {
      const auto &ta = a.as<TupleStructure>(), &tu = upper.as<TupleStructure>(), &tl = lower.as<TupleStructure>();
      if (ta.combinator != tu.combinator || tu.combinator != tl.combinator ||
          ta.children.size() != tu.children.size() || tu.children.size() != tl.children.size()) {
        mismatch(a, upper);
      }
      std::vector<std::shared_ptr<const MatchNode>> children;
      for (std::size_t i = 0; i < ta.children.size(); ++i) {
        children.push_back(build(ta.children[i], tu.children[i], tl.children[i], m));
      }
      return std::make_shared<TupleNode>(std::move(children), ta.combinator);
    }
    case Family::Curve: {
      auto left = curve_of(a), up = curve_of(upper), low = curve_of(lower);
      const std::size_t n = std::min(left.times.size(), up.times.size());
      if (!std::equal(left.times.begin(), left.times.begin() + static_cast<std::ptrdiff_t>(n), up.times.begin())) {
        throw Error(Errc::GridMismatch, "curves are sampled on incompatible time grids");
      }
      const std::size_t ll = low.values.size();
      if (ll > up.values.size() || !std::equal(low.values.begin(), low.values.end(), up.values.begin())) {
        throw Error(Errc::InvalidArgument, "lower curve is not a prefix of the upper curve");
      }
      return std::make_shared<CurveNode>(std::move(left), std::move(up), ll);
    }
    case Family::Set:
    case Family::Measure: {
      // kinds must agree exactly among the non-absent participants
      std::optional<StructureKind> kind;
      for (const auto* s : all) {
        if (s->kind() == StructureKind::Absent) continue;
        if (kind && *kind != s->kind()) mismatch(a, upper);
        kind = s->kind();
      }
      Flavour fl;
      if (auto f = flavour_of(a)) {
        for (const auto* s : all) {
          auto g = flavour_of(*s);
          if (!g || g->k != f->k || !(g->marks == f->marks)) mismatch(a, upper);
        }
        fl = *f;
      }
      auto left = items_of(a), up = items_of(upper), low = items_of(lower);
      const std::string kind_name = kind == StructureKind::Point || !kind ? "points"
                                    : *fam == Family::Set                ? "subset"
                                                                         : "measure";
      if (*fam == Family::Set) {
        std::vector<char> in_lower(up.size(), 0);
        for (const auto& l : low) {
          auto it = std::find_if(up.begin(), up.end(), [&](const Item& u) { return u.at == l.at; });
          if (it == up.end()) throw Error(Errc::InvalidArgument, "lower structure is not below the upper one");
          in_lower[static_cast<std::size_t>(it - up.begin())] = 1;
        }
        return std::make_shared<SetNode>(kind_name, std::move(left), std::move(up), std::move(in_lower), fl.marks, m);
      }
      std::vector<double> lower_w(up.size(), 0.0);
      for (const auto& l : low) {
        auto it = std::find_if(up.begin(), up.end(), [&](const Item& u) { return u.at == l.at; });
        if (it == up.end() || l.weight > it->weight) {
          throw Error(Errc::InvalidArgument, "lower structure is not below the upper one");
        }
        lower_w[static_cast<std::size_t>(it - up.begin())] = l.weight;
      }
      return std::make_shared<MeasureNode>(std::move(left), std::move(up), std::move(lower_w), fl.marks, m);
    }
  }
  mismatch(a, upper);
}

}  // namespace

Relation Relation::of(const Correspondence& r) {
  Relation out(r.left().size(), r.right().size());
  for (auto [i, j] : r.pairs()) out.set(i, j);
  return out;
}

Matcher::Matcher(const FiniteMetricSpace& left, const Structure& a, const FiniteMetricSpace& right,
                 const Structure& upper, const Structure& lower) {
  a.validate_on(left.size());
  upper.validate_on(right.size());
  lower.validate_on(right.size());
  root_ = build(a, upper, lower, right.size());
}

std::vector<Certificate> Matcher::certify(const Relation& r, double eps) const {
  std::vector<Certificate> out;
  root_->certify(r, eps, "", out);
  return out;
}

}  // namespace ghforge::detail
