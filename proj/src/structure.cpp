#include "ghforge/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ghforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_marked_point(const MarkedPoint& p, std::size_t k, const MarkSpace& marks) {
  if (p.points.size() != k) throw Error(Errc::InvalidArgument, "marked tuple has the wrong length");
  if (p.mark >= marks.size()) throw Error(Errc::InvalidArgument, "mark index outside the mark space", {p.mark});
}

// True when the shorter grid is a prefix of the longer one.
bool grids_compatible(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  return std::equal(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(n), b.begin());
}

double product_distance(const FiniteMetricSpace& host, const MarkSpace& marks, const MarkedPoint& a,
                        const MarkedPoint& b) {
  double d = marks.distance(a.mark, b.mark);
  for (std::size_t i = 0; i < a.points.size(); ++i) d = std::max(d, host(a.points[i], b.points[i]));
  return d;
}

[[noreturn]] void kind_mismatch(const Structure& a, const Structure& b) {
  throw Error(Errc::KindMismatch, "cannot compare " + signature(a) + " with " + signature(b));
}

}  // namespace

MarkSpace MarkSpace::trivial() {
  static const FiniteMetricSpace single = FiniteMetricSpace::from_matrix({"*"}, {{0.0}});
  return MarkSpace(single);
}

bool operator==(const TupleStructure& a, const TupleStructure& b) {
  return a.combinator == b.combinator && a.children == b.children;
}

// ---------------------------------------------------------------------------
// factories

Structure Structure::point(std::size_t index) { return Structure(PointStructure{index}); }

Structure Structure::measure(Weights weights) {
  Weights clean;
  for (auto [i, w] : weights) {
    if (!std::isfinite(w) || w < 0.0) throw Error(Errc::InvalidArgument, "measure weights must be finite and >= 0", {i});
    if (w > 0.0) clean.emplace(i, w);
  }
  return Structure(MeasureStructure{std::move(clean)});
}

Structure Structure::subset(std::vector<std::size_t> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return Structure(SubsetStructure{std::move(members)});
}

Structure Structure::marked_measure(std::size_t k, MarkSpace marks, std::vector<MarkedAtom> atoms) {
  if (k == 0) throw Error(Errc::InvalidArgument, "marked structures need k >= 1");
  for (const auto& a : atoms) {
    check_marked_point(a.at, k, marks);
    if (!std::isfinite(a.weight) || a.weight < 0.0) throw Error(Errc::InvalidArgument, "atom weight must be >= 0");
  }
  std::sort(atoms.begin(), atoms.end(), [](const MarkedAtom& x, const MarkedAtom& y) { return x.at < y.at; });
  std::vector<MarkedAtom> merged;
  for (auto& a : atoms) {
    if (a.weight == 0.0) continue;
    if (!merged.empty() && merged.back().at == a.at) {
      merged.back().weight += a.weight;
    } else {
      merged.push_back(std::move(a));
    }
  }
  return Structure(MarkedMeasureStructure{k, std::move(marks), std::move(merged)});
}

Structure Structure::marked_subset(std::size_t k, MarkSpace marks, std::vector<MarkedPoint> members) {
  if (k == 0) throw Error(Errc::InvalidArgument, "marked structures need k >= 1");
  for (const auto& m : members) check_marked_point(m, k, marks);
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return Structure(MarkedSubsetStructure{k, std::move(marks), std::move(members)});
}

Structure Structure::curve(std::vector<double> times, std::vector<std::size_t> values) {
  if (times.empty() || times.size() != values.size()) {
    throw Error(Errc::InvalidArgument, "a curve needs equally many (>= 1) times and values");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i])) throw Error(Errc::InvalidArgument, "curve times must be finite");
    if (i > 0 && !(times[i] > times[i - 1])) throw Error(Errc::InvalidArgument, "curve times must increase strictly");
  }
  while (values.size() > 1 && values[values.size() - 1] == values[values.size() - 2]) {
    values.pop_back();
    times.pop_back();
  }
  return Structure(CurveStructure{std::move(times), std::move(values)});
}

Structure Structure::tuple(std::vector<Structure> children, Combinator combinator) {
  if (combinator == Combinator::Weighted && children.empty()) {
    throw Error(Errc::InvalidArgument, "a weighted tuple needs at least one child");
  }
  return Structure(TupleStructure{std::move(children), combinator});
}

Structure Structure::none() { return tuple({}, Combinator::Max); }
Structure Structure::absent() { return Structure(AbsentStructure{}); }

bool Structure::is_none() const noexcept {
  const auto* t = std::get_if<TupleStructure>(&value_);
  return t != nullptr && t->children.empty() && t->combinator == Combinator::Max;
}

void Structure::validate_on(std::size_t host_size) const {
  auto check = [&](std::size_t i) {
    if (i >= host_size) throw Error(Errc::HostMismatch, "structure refers to point " + std::to_string(i) +
                                                            " of a " + std::to_string(host_size) + "-point space",
                                    {i});
  };
  std::visit(overloaded{
                 [&](const PointStructure& p) { check(p.index); },
                 [&](const MeasureStructure& m) {
                   for (auto [i, w] : m.weights) check(i);
                 },
                 [&](const SubsetStructure& s) {
                   for (auto i : s.members) check(i);
                 },
                 [&](const MarkedMeasureStructure& m) {
                   for (const auto& a : m.atoms)
                     for (auto i : a.at.points) check(i);
                 },
                 [&](const MarkedSubsetStructure& m) {
                   for (const auto& p : m.members)
                     for (auto i : p.points) check(i);
                 },
                 [&](const CurveStructure& c) {
                   for (auto i : c.values) check(i);
                 },
                 [&](const TupleStructure& t) {
                   for (const auto& c : t.children) c.validate_on(host_size);
                 },
                 [](const AbsentStructure&) {},
             },
             value_);
}

std::string_view to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::Point: return "point";
    case StructureKind::Measure: return "measure";
    case StructureKind::Subset: return "subset";
    case StructureKind::MarkedMeasure: return "marked_measure";
    case StructureKind::MarkedSubset: return "marked_subset";
    case StructureKind::Curve: return "curve";
    case StructureKind::Tuple: return "tuple";
    case StructureKind::Absent: return "absent";
  }
  return "unknown";
}

std::string signature(const Structure& s) {
  return std::visit(overloaded{
                        [](const MarkedMeasureStructure& m) {
                          return "marked_measure(k=" + std::to_string(m.k) + ",marks=" +
                                 std::to_string(m.marks.size()) + ")";
                        },
                        [](const MarkedSubsetStructure& m) {
                          return "marked_subset(k=" + std::to_string(m.k) + ",marks=" +
                                 std::to_string(m.marks.size()) + ")";
                        },
                        [](const TupleStructure& t) {
                          std::string out = t.combinator == Combinator::Max ? "tuple:max[" : "tuple:weighted[";
                          for (std::size_t i = 0; i < t.children.size(); ++i) {
                            if (i) out += ",";
                            out += signature(t.children[i]);
                          }
                          return out + "]";
                        },
                        [&](const auto&) { return std::string(to_string(s.kind())); },
                    },
                    s.value());
}

bool comparable(const Structure& a, const Structure& b) {
  const auto ka = a.kind(), kb = b.kind();
  auto absent_ok = [](StructureKind k) {
    return k == StructureKind::Absent || k == StructureKind::Point || k == StructureKind::Curve;
  };
  if (ka == StructureKind::Absent || kb == StructureKind::Absent) return absent_ok(ka) && absent_ok(kb);
  if (ka != kb) return false;
  switch (ka) {
    case StructureKind::MarkedMeasure: {
      const auto &x = a.as<MarkedMeasureStructure>(), &y = b.as<MarkedMeasureStructure>();
      return x.k == y.k && x.marks == y.marks;
    }
    case StructureKind::MarkedSubset: {
      const auto &x = a.as<MarkedSubsetStructure>(), &y = b.as<MarkedSubsetStructure>();
      return x.k == y.k && x.marks == y.marks;
    }
    case StructureKind::Curve:
      return grids_compatible(a.as<CurveStructure>().times, b.as<CurveStructure>().times);
    case StructureKind::Tuple: {
      const auto &x = a.as<TupleStructure>(), &y = b.as<TupleStructure>();
      if (x.combinator != y.combinator || x.children.size() != y.children.size()) return false;
      for (std::size_t i = 0; i < x.children.size(); ++i) {
        if (!comparable(x.children[i], y.children[i])) return false;
      }
      return true;
    }
    default:
      return true;
  }
}

StructuredSpace::StructuredSpace(FiniteMetricSpace s, Structure st, std::optional<std::size_t> o)
    : space(std::move(s)), structure(std::move(st)), origin(o) {
  if (origin && *origin >= space.size()) throw Error(Errc::InvalidArgument, "origin index out of range", {*origin});
  structure.validate_on(space.size());
}

// ---------------------------------------------------------------------------
// pushforward

Structure pushforward(const Structure& s, const IsometricEmbedding& f) {
  s.validate_on(f.source().size());
  auto map_point = [&](const MarkedPoint& p) {
    MarkedPoint q{p.points, p.mark};
    for (auto& i : q.points) i = f(i);
    return q;
  };
  return std::visit(overloaded{
                        [&](const PointStructure& p) { return Structure::point(f(p.index)); },
                        [&](const MeasureStructure& m) {
                          Weights w;
                          for (auto [i, x] : m.weights) w[f(i)] = x;
                          return Structure::measure(std::move(w));
                        },
                        [&](const SubsetStructure& st) {
                          std::vector<std::size_t> out;
                          for (auto i : st.members) out.push_back(f(i));
                          return Structure::subset(std::move(out));
                        },
                        [&](const MarkedMeasureStructure& m) {
                          std::vector<MarkedAtom> atoms;
                          for (const auto& a : m.atoms) atoms.push_back({map_point(a.at), a.weight});
                          return Structure::marked_measure(m.k, m.marks, std::move(atoms));
                        },
                        [&](const MarkedSubsetStructure& m) {
                          std::vector<MarkedPoint> out;
                          for (const auto& p : m.members) out.push_back(map_point(p));
                          return Structure::marked_subset(m.k, m.marks, std::move(out));
                        },
                        [&](const CurveStructure& c) {
                          std::vector<std::size_t> values;
                          for (auto i : c.values) values.push_back(f(i));
                          return Structure::curve(c.times, std::move(values));
                        },
                        [&](const TupleStructure& t) {
                          std::vector<Structure> children;
                          for (const auto& c : t.children) children.push_back(pushforward(c, f));
                          return Structure::tuple(std::move(children), t.combinator);
                        },
                        [](const AbsentStructure&) { return Structure::absent(); },
                    },
                    s.value());
}

// ---------------------------------------------------------------------------
// ambient distance

double ambient_distance(const Structure& s, const Structure& t, const FiniteMetricSpace& host,
                        const ProkhorovOptions& prokhorov) {
  s.validate_on(host.size());
  t.validate_on(host.size());
  if (s.kind() == StructureKind::Curve && t.kind() == StructureKind::Curve && !comparable(s, t)) {
    throw Error(Errc::GridMismatch, "curves are sampled on incompatible time grids");
  }
  if (!comparable(s, t)) kind_mismatch(s, t);
  if (s.kind() == StructureKind::Absent || t.kind() == StructureKind::Absent) {
    return s.kind() == t.kind() ? 0.0 : kInf;
  }

  switch (s.kind()) {
    case StructureKind::Point:
      return host(s.as<PointStructure>().index, t.as<PointStructure>().index);
    case StructureKind::Measure:
      return prokhorov_distance(FiniteMeasure(host, s.as<MeasureStructure>().weights),
                                FiniteMeasure(host, t.as<MeasureStructure>().weights), prokhorov);
    case StructureKind::Subset:
      return hausdorff_distance(host, s.as<SubsetStructure>().members, t.as<SubsetStructure>().members);
    case StructureKind::MarkedMeasure: {
      const auto &a = s.as<MarkedMeasureStructure>(), &b = t.as<MarkedMeasureStructure>();
      std::vector<double> wa, wb;
      for (const auto& x : a.atoms) wa.push_back(x.weight);
      for (const auto& x : b.atoms) wb.push_back(x.weight);
      auto cross = [&](std::size_t i, std::size_t j) {
        return product_distance(host, a.marks, a.atoms[i].at, b.atoms[j].at);
      };
      if (std::max(wa.size(), wb.size()) > prokhorov.subset_guard) {
        if (!prokhorov.coupling_fallback) throw Error(Errc::TooLarge, "Prokhorov subset scan exceeds its guard");
        return detail::prokhorov_coupling(wa, wb, cross);
      }
      return detail::prokhorov_scan(wa, wb, cross, prokhorov.subset_guard);
    }
    case StructureKind::MarkedSubset: {
      const auto &a = s.as<MarkedSubsetStructure>(), &b = t.as<MarkedSubsetStructure>();
      return detail::hausdorff_generic(a.members.size(), b.members.size(), [&](std::size_t i, std::size_t j) {
        return product_distance(host, a.marks, a.members[i], b.members[j]);
      });
    }
    case StructureKind::Curve: {
      const auto &a = s.as<CurveStructure>(), &b = t.as<CurveStructure>();
      const std::size_t len = std::max(a.values.size(), b.values.size());
      double worst = 0.0;
      for (std::size_t i = 0; i < len; ++i) {
        const auto x = a.values[std::min(i, a.values.size() - 1)];
        const auto y = b.values[std::min(i, b.values.size() - 1)];
        worst = std::max(worst, host(x, y));
      }
      return worst;
    }
    case StructureKind::Tuple: {
      const auto &a = s.as<TupleStructure>(), &b = t.as<TupleStructure>();
      double worst = 0.0;
      double weight = 1.0;
      for (std::size_t i = 0; i < a.children.size(); ++i) {
        const double d = ambient_distance(a.children[i], b.children[i], host, prokhorov);
        if (a.combinator == Combinator::Max) {
          worst = std::max(worst, d);
        } else {
          weight *= 0.5;
          worst = std::max(worst, weight * std::min(1.0, d));
        }
      }
      return worst;
    }
    case StructureKind::Absent:
      break;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// truncation and order

Structure truncate(const Structure& s, const IsometricEmbedding& f, GravePolicy policy) {
  s.validate_on(f.target().size());
  auto lift = [&](const MarkedPoint& p) -> std::optional<MarkedPoint> {
    MarkedPoint q{p.points, p.mark};
    for (auto& i : q.points) {
      auto pre = f.preimage(i);
      if (!pre) return std::nullopt;
      i = *pre;
    }
    return q;
  };
  auto grave = [&](const std::string& what) {
    if (policy == GravePolicy::Error) throw Error(Errc::OutOfBall, what + " lies outside the subspace");
    return Structure::absent();
  };
  return std::visit(overloaded{
                        [&](const PointStructure& p) {
                          auto pre = f.preimage(p.index);
                          return pre ? Structure::point(*pre) : grave("point " + f.target().label(p.index));
                        },
                        [&](const MeasureStructure& m) {
                          Weights w;
                          for (auto [i, x] : m.weights) {
                            if (auto pre = f.preimage(i)) w[*pre] = x;
                          }
                          return Structure::measure(std::move(w));
                        },
                        [&](const SubsetStructure& st) {
                          std::vector<std::size_t> out;
                          for (auto i : st.members) {
                            if (auto pre = f.preimage(i)) out.push_back(*pre);
                          }
                          return Structure::subset(std::move(out));
                        },
                        [&](const MarkedMeasureStructure& m) {
                          std::vector<MarkedAtom> atoms;
                          for (const auto& a : m.atoms) {
                            if (auto q = lift(a.at)) atoms.push_back({*q, a.weight});
                          }
                          return Structure::marked_measure(m.k, m.marks, std::move(atoms));
                        },
                        [&](const MarkedSubsetStructure& m) {
                          std::vector<MarkedPoint> out;
                          for (const auto& p : m.members) {
                            if (auto q = lift(p)) out.push_back(*q);
                          }
                          return Structure::marked_subset(m.k, m.marks, std::move(out));
                        },
                        [&](const CurveStructure& c) {
                          std::vector<double> times;
                          std::vector<std::size_t> values;
                          for (std::size_t i = 0; i < c.values.size(); ++i) {
                            auto pre = f.preimage(c.values[i]);
                            if (!pre) break;
                            times.push_back(c.times[i]);
                            values.push_back(*pre);
                          }
                          if (values.empty()) return grave("curve start");
                          return Structure::curve(std::move(times), std::move(values));
                        },
                        [&](const TupleStructure& t) {
                          std::vector<Structure> children;
                          for (const auto& c : t.children) children.push_back(truncate(c, f, policy));
                          return Structure::tuple(std::move(children), t.combinator);
                        },
                        [](const AbsentStructure&) { return Structure::absent(); },
                    },
                    s.value());
}

bool structure_leq(const Structure& s, const Structure& t) {
  if (s.kind() == StructureKind::Absent) return true;
  if (t.kind() == StructureKind::Absent) {
    if (s.kind() != StructureKind::Point && s.kind() != StructureKind::Curve) kind_mismatch(s, t);
    return false;
  }
  if (s.kind() != t.kind()) kind_mismatch(s, t);
  switch (s.kind()) {
    case StructureKind::Point:
      return s.as<PointStructure>().index == t.as<PointStructure>().index;
    case StructureKind::Measure: {
      const auto& big = t.as<MeasureStructure>().weights;
      for (auto [i, w] : s.as<MeasureStructure>().weights) {
        auto it = big.find(i);
        if (it == big.end() || w > it->second) return false;
      }
      return true;
    }
    case StructureKind::Subset: {
      const auto &a = s.as<SubsetStructure>().members, &b = t.as<SubsetStructure>().members;
      return std::includes(b.begin(), b.end(), a.begin(), a.end());
    }
    case StructureKind::MarkedMeasure: {
      const auto &a = s.as<MarkedMeasureStructure>(), &b = t.as<MarkedMeasureStructure>();
      if (a.k != b.k || !(a.marks == b.marks)) kind_mismatch(s, t);
      for (const auto& x : a.atoms) {
        auto it = std::lower_bound(b.atoms.begin(), b.atoms.end(), x.at,
                                   [](const MarkedAtom& y, const MarkedPoint& p) { return y.at < p; });
        if (it == b.atoms.end() || !(it->at == x.at) || x.weight > it->weight) return false;
      }
      return true;
    }
    case StructureKind::MarkedSubset: {
      const auto &a = s.as<MarkedSubsetStructure>(), &b = t.as<MarkedSubsetStructure>();
      if (a.k != b.k || !(a.marks == b.marks)) kind_mismatch(s, t);
      return std::includes(b.members.begin(), b.members.end(), a.members.begin(), a.members.end());
    }
    case StructureKind::Curve: {
      const auto &a = s.as<CurveStructure>(), &b = t.as<CurveStructure>();
      if (a.values.size() > b.values.size()) return false;
      return std::equal(a.times.begin(), a.times.end(), b.times.begin()) &&
             std::equal(a.values.begin(), a.values.end(), b.values.begin());
    }
    case StructureKind::Tuple: {
      const auto &a = s.as<TupleStructure>(), &b = t.as<TupleStructure>();
      if (a.combinator != b.combinator || a.children.size() != b.children.size()) kind_mismatch(s, t);
      for (std::size_t i = 0; i < a.children.size(); ++i) {
        if (!structure_leq(a.children[i], b.children[i])) return false;
      }
      return true;
    }
    case StructureKind::Absent:
      break;
  }
  return true;
}

Structure bottom(const Structure& s) {
  return std::visit(overloaded{
                        [](const MeasureStructure&) { return Structure::measure({}); },
                        [](const SubsetStructure&) { return Structure::subset({}); },
                        [](const MarkedMeasureStructure& m) { return Structure::marked_measure(m.k, m.marks, {}); },
                        [](const MarkedSubsetStructure& m) { return Structure::marked_subset(m.k, m.marks, {}); },
                        [](const TupleStructure& t) {
                          std::vector<Structure> children;
                          for (const auto& c : t.children) children.push_back(bottom(c));
                          return Structure::tuple(std::move(children), t.combinator);
                        },
                        [](const auto&) { return Structure::absent(); },
                    },
                    s.value());
}

}  // namespace ghforge
