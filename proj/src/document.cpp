#include "ghforge/document.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"

namespace ghforge {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(Errc::SchemaError, what + " at " + (path.empty() ? "/" : path));
}

std::string child(const std::string& path, const std::string& key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~') {
      escaped += "~0";
    } else if (c == '/') {
      escaped += "~1";
    } else {
      escaped += c;
    }
  }
  return path + "/" + escaped;
}
std::string child(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }

const json& field(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path, "missing field \"" + key + "\"");
  return *it;
}

void expect_object(const json& v, const std::string& path) {
  if (!v.is_object()) schema_error(path, "expected an object");
}
void expect_array(const json& v, const std::string& path) {
  if (!v.is_array()) schema_error(path, "expected an array");
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) schema_error(path, "expected a number");
  return v.get<double>();
}

std::size_t count(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    schema_error(path, "expected a nonnegative integer");
  }
  return v.get<std::size_t>();
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) schema_error(path, "expected a string");
  return v.get<std::string>();
}

void allow_only(const json& obj, std::initializer_list<const char*> keys, const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) schema_error(child(path, it.key()), "unknown field");
  }
}

Matrix read_matrix(const json& v, const std::string& path) {
  expect_array(v, path);
  Matrix m;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto p = child(path, i);
    expect_array(v[i], p);
    std::vector<double> row;
    for (std::size_t j = 0; j < v[i].size(); ++j) row.push_back(number(v[i][j], child(p, j)));
    m.push_back(std::move(row));
  }
  return m;
}

std::vector<std::string> read_labels(const json& v, const std::string& path) {
  expect_array(v, path);
  if (v.empty()) schema_error(path, "at least one point is required");
  std::vector<std::string> labels;
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < v.size(); ++i) {
    labels.push_back(text(v[i], child(path, i)));
    if (!seen.emplace(labels.back(), i).second) schema_error(child(path, i), "duplicate label \"" + labels.back() + "\"");
  }
  return labels;
}

Matrix from_coordinates(const json& coords, const std::string& norm, std::size_t n, const std::string& path) {
  expect_array(coords, path);
  if (coords.size() != n) schema_error(path, "expected one coordinate row per point");
  std::vector<std::vector<double>> x;
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = child(path, i);
    expect_array(coords[i], p);
    std::vector<double> row;
    for (std::size_t j = 0; j < coords[i].size(); ++j) row.push_back(number(coords[i][j], child(p, j)));
    if (!x.empty() && row.size() != x.front().size()) schema_error(p, "coordinate rows differ in length");
    x.push_back(std::move(row));
  }
  Matrix m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double d = 0.0;
      for (std::size_t t = 0; t < x[i].size(); ++t) {
        const double diff = std::abs(x[i][t] - x[j][t]);
        if (norm == "1") {
          d += diff;
        } else if (norm == "2") {
          d += diff * diff;
        } else {
          d = std::max(d, diff);
        }
      }
      m[i][j] = norm == "2" ? std::sqrt(d) : d;
    }
  }
  return m;
}

struct Context {
  const FiniteMetricSpace* space;
  std::map<std::string, MarkSpace> marks;
};

std::size_t point_ref(const Context& ctx, const json& v, const std::string& path) {
  const auto label = text(v, path);
  auto idx = ctx.space->index_of(label);
  if (!idx) throw Error(Errc::DanglingLabel, "unknown point \"" + label + "\" at " + path);
  return *idx;
}

std::size_t mark_ref(const MarkSpace& marks, const json& v, const std::string& path) {
  const auto label = text(v, path);
  auto idx = marks.space().index_of(label);
  if (!idx) throw Error(Errc::DanglingLabel, "unknown mark \"" + label + "\" at " + path);
  return *idx;
}

const MarkSpace& mark_space_ref(const Context& ctx, const json& v, const std::string& path) {
  const auto name = text(v, path);
  auto it = ctx.marks.find(name);
  if (it == ctx.marks.end()) throw Error(Errc::DanglingLabel, "unknown mark space \"" + name + "\" at " + path);
  return it->second;
}

MarkedPoint marked_point(const Context& ctx, const json& v, std::size_t k, const MarkSpace& marks,
                         const std::string& path) {
  expect_object(v, path);
  const auto& at = field(v, "at", path);
  expect_array(at, child(path, "at"));
  if (at.size() != k) schema_error(child(path, "at"), "expected " + std::to_string(k) + " points");
  MarkedPoint p{{}, mark_ref(marks, field(v, "mark", path), child(path, "mark"))};
  for (std::size_t i = 0; i < at.size(); ++i) p.points.push_back(point_ref(ctx, at[i], child(child(path, "at"), i)));
  return p;
}

Structure read_structure(const Context& ctx, const json& v, const std::string& path) {
  expect_object(v, path);
  const auto kind = text(field(v, "kind", path), child(path, "kind"));
  if (kind == "point") {
    allow_only(v, {"kind", "at"}, path);
    return Structure::point(point_ref(ctx, field(v, "at", path), child(path, "at")));
  }
  if (kind == "measure") {
    allow_only(v, {"kind", "weights"}, path);
    const auto& w = field(v, "weights", path);
    const auto wp = child(path, "weights");
    expect_object(w, wp);
    Weights weights;
    for (auto it = w.begin(); it != w.end(); ++it) {
      const auto p = child(wp, it.key());
      const double x = number(it.value(), p);
      if (!(x >= 0.0) || !std::isfinite(x)) schema_error(p, "weights must be finite and >= 0");
      weights[point_ref(ctx, json(it.key()), p)] = x;
    }
    return Structure::measure(std::move(weights));
  }
  if (kind == "subset") {
    allow_only(v, {"kind", "members"}, path);
    const auto& m = field(v, "members", path);
    const auto mp = child(path, "members");
    expect_array(m, mp);
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < m.size(); ++i) members.push_back(point_ref(ctx, m[i], child(mp, i)));
    return Structure::subset(std::move(members));
  }
  if (kind == "marked_measure" || kind == "marked_subset") {
    const bool measure = kind == "marked_measure";
    allow_only(v, {"kind", "k", "mark_space", measure ? "atoms" : "members"}, path);
    const std::size_t k = count(field(v, "k", path), child(path, "k"));
    if (k == 0) schema_error(child(path, "k"), "k must be >= 1");
    const MarkSpace& marks = mark_space_ref(ctx, field(v, "mark_space", path), child(path, "mark_space"));
    const std::string list_key = measure ? "atoms" : "members";
    const auto& list = field(v, list_key, path);
    const auto lp = child(path, list_key);
    expect_array(list, lp);
    if (measure) {
      std::vector<MarkedAtom> atoms;
      for (std::size_t i = 0; i < list.size(); ++i) {
        const auto p = child(lp, i);
        auto at = marked_point(ctx, list[i], k, marks, p);
        const double w = number(field(list[i], "weight", p), child(p, "weight"));
        if (!(w >= 0.0) || !std::isfinite(w)) schema_error(child(p, "weight"), "weights must be finite and >= 0");
        atoms.push_back({std::move(at), w});
      }
      return Structure::marked_measure(k, marks, std::move(atoms));
    }
    std::vector<MarkedPoint> members;
    for (std::size_t i = 0; i < list.size(); ++i) members.push_back(marked_point(ctx, list[i], k, marks, child(lp, i)));
    return Structure::marked_subset(k, marks, std::move(members));
  }
  if (kind == "curve") {
    allow_only(v, {"kind", "times", "values"}, path);
    const auto& t = field(v, "times", path);
    const auto& vals = field(v, "values", path);
    expect_array(t, child(path, "times"));
    expect_array(vals, child(path, "values"));
    if (t.empty() || t.size() != vals.size()) schema_error(path, "times and values need equal nonzero lengths");
    std::vector<double> times;
    std::vector<std::size_t> values;
    for (std::size_t i = 0; i < t.size(); ++i) {
      times.push_back(number(t[i], child(child(path, "times"), i)));
      if (i > 0 && !(times[i] > times[i - 1])) schema_error(child(child(path, "times"), i), "times must increase");
      values.push_back(point_ref(ctx, vals[i], child(child(path, "values"), i)));
    }
    return Structure::curve(std::move(times), std::move(values));
  }
  if (kind == "tuple") {
    allow_only(v, {"kind", "combinator", "children"}, path);
    Combinator comb = Combinator::Max;
    if (v.contains("combinator")) {
      const auto c = text(v["combinator"], child(path, "combinator"));
      if (c == "weighted") {
        comb = Combinator::Weighted;
      } else if (c != "max") {
        schema_error(child(path, "combinator"), "expected \"max\" or \"weighted\"");
      }
    }
    const auto& ch = field(v, "children", path);
    expect_array(ch, child(path, "children"));
    if (comb == Combinator::Weighted && ch.empty()) schema_error(child(path, "children"), "weighted tuple needs a child");
    std::vector<Structure> children;
    for (std::size_t i = 0; i < ch.size(); ++i) children.push_back(read_structure(ctx, ch[i], child(child(path, "children"), i)));
    return Structure::tuple(std::move(children), comb);
  }
  if (kind == "absent") {
    allow_only(v, {"kind"}, path);
    return Structure::absent();
  }
  schema_error(child(path, "kind"), "unknown structure kind \"" + kind + "\"");
}

// ---------------------------------------------------------------------------

struct Writer {
  const FiniteMetricSpace& space;
  std::vector<MarkSpace> marks;

  std::string mark_name(const MarkSpace& m) {
    for (std::size_t i = 0; i < marks.size(); ++i) {
      if (marks[i] == m) return "marks" + std::to_string(i);
    }
    marks.push_back(m);
    return "marks" + std::to_string(marks.size() - 1);
  }

  json marked(const MarkedPoint& p, const MarkSpace& m) {
    json at = json::array();
    for (auto i : p.points) at.push_back(space.label(i));
    return json{{"at", at}, {"mark", m.space().label(p.mark)}};
  }

  json write(const Structure& s) {
    switch (s.kind()) {
      case StructureKind::Point:
        return json{{"kind", "point"}, {"at", space.label(s.as<PointStructure>().index)}};
      case StructureKind::Measure: {
        json w = json::object();
        for (auto [i, x] : s.as<MeasureStructure>().weights) w[space.label(i)] = x;
        return json{{"kind", "measure"}, {"weights", w}};
      }
      case StructureKind::Subset: {
        json m = json::array();
        for (auto i : s.as<SubsetStructure>().members) m.push_back(space.label(i));
        return json{{"kind", "subset"}, {"members", m}};
      }
      case StructureKind::MarkedMeasure: {
        const auto& mm = s.as<MarkedMeasureStructure>();
        json atoms = json::array();
        for (const auto& a : mm.atoms) {
          auto rec = marked(a.at, mm.marks);
          rec["weight"] = a.weight;
          atoms.push_back(rec);
        }
        return json{{"kind", "marked_measure"}, {"k", mm.k}, {"mark_space", mark_name(mm.marks)}, {"atoms", atoms}};
      }
      case StructureKind::MarkedSubset: {
        const auto& ms = s.as<MarkedSubsetStructure>();
        json members = json::array();
        for (const auto& p : ms.members) members.push_back(marked(p, ms.marks));
        return json{{"kind", "marked_subset"}, {"k", ms.k}, {"mark_space", mark_name(ms.marks)}, {"members", members}};
      }
      case StructureKind::Curve: {
        const auto& c = s.as<CurveStructure>();
        json values = json::array();
        for (auto i : c.values) values.push_back(space.label(i));
        return json{{"kind", "curve"}, {"times", c.times}, {"values", values}};
      }
      case StructureKind::Tuple: {
        const auto& t = s.as<TupleStructure>();
        json children = json::array();
        for (const auto& c : t.children) children.push_back(write(c));
        return json{{"kind", "tuple"},
                    {"combinator", t.combinator == Combinator::Max ? "max" : "weighted"},
                    {"children", children}};
      }
      case StructureKind::Absent:
        break;
    }
    return json{{"kind", "absent"}};
  }
};

}  // namespace

StructuredSpace parse_space(std::string_view input) {
  json doc;
  try {
    doc = json::parse(input.begin(), input.end());
  } catch (const json::parse_error& e) {
    throw Error(Errc::SchemaError, std::string("malformed JSON: ") + e.what() + " at /");
  }
  expect_object(doc, "");
  allow_only(doc, {"format_version", "points", "metric", "origin", "structures", "mark_spaces"}, "");
  const auto version = text(field(doc, "format_version", ""), "/format_version");
  if (version != kFormatVersion) schema_error("/format_version", "unsupported format version \"" + version + "\"");

  const auto labels = read_labels(field(doc, "points", ""), "/points");
  const auto& metric = field(doc, "metric", "");
  expect_object(metric, "/metric");
  Matrix matrix;
  if (metric.contains("matrix")) {
    allow_only(metric, {"matrix"}, "/metric");
    matrix = read_matrix(metric["matrix"], "/metric/matrix");
    if (matrix.size() != labels.size()) schema_error("/metric/matrix", "expected one row per point");
    for (std::size_t i = 0; i < matrix.size(); ++i) {
      if (matrix[i].size() != labels.size()) schema_error(child("/metric/matrix", i), "expected one entry per point");
    }
  } else if (metric.contains("coordinates")) {
    allow_only(metric, {"coordinates", "norm"}, "/metric");
    std::string norm = "2";
    if (metric.contains("norm")) {
      norm = text(metric["norm"], "/metric/norm");
      if (norm != "1" && norm != "2" && norm != "inf") schema_error("/metric/norm", "norm must be \"1\", \"2\" or \"inf\"");
    }
    matrix = from_coordinates(metric["coordinates"], norm, labels.size(), "/metric/coordinates");
  } else {
    schema_error("/metric", "expected \"matrix\" or \"coordinates\"");
  }
  const auto space = FiniteMetricSpace::from_matrix(labels, matrix);

  Context ctx{&space, {}};
  if (doc.contains("mark_spaces")) {
    const auto& ms = doc["mark_spaces"];
    expect_object(ms, "/mark_spaces");
    for (auto it = ms.begin(); it != ms.end(); ++it) {
      const auto p = child("/mark_spaces", it.key());
      expect_object(it.value(), p);
      allow_only(it.value(), {"labels", "matrix"}, p);
      const auto ml = read_labels(field(it.value(), "labels", p), child(p, "labels"));
      const auto mm = read_matrix(field(it.value(), "matrix", p), child(p, "matrix"));
      if (mm.size() != ml.size()) schema_error(child(p, "matrix"), "expected one row per mark");
      for (std::size_t i = 0; i < mm.size(); ++i) {
        if (mm[i].size() != ml.size()) schema_error(child(child(p, "matrix"), i), "expected one entry per mark");
      }
      ctx.marks.emplace(it.key(), MarkSpace(FiniteMetricSpace::from_matrix(ml, mm)));
    }
  }

  std::optional<std::size_t> origin;
  if (doc.contains("origin")) origin = point_ref(ctx, doc["origin"], "/origin");

  Structure structure = Structure::none();
  if (doc.contains("structures")) {
    const auto& list = doc["structures"];
    expect_array(list, "/structures");
    std::vector<Structure> parts;
    for (std::size_t i = 0; i < list.size(); ++i) parts.push_back(read_structure(ctx, list[i], child("/structures", i)));
    if (parts.size() == 1) {
      structure = std::move(parts.front());
    } else if (parts.size() > 1) {
      structure = Structure::tuple(std::move(parts));
    }
  }
  return StructuredSpace(space, std::move(structure), origin);
}

StructuredSpace load_space(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::InvalidArgument, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_space(buf.str());
}

std::string serialize_space(const StructuredSpace& s) {
  Writer w{s.space, {}};
  json structures = json::array();
  const auto& st = s.structure;
  if (st.is_none()) {
    // nothing
  } else if (st.kind() == StructureKind::Tuple && st.as<TupleStructure>().combinator == Combinator::Max &&
             st.as<TupleStructure>().children.size() >= 2) {
    for (const auto& c : st.as<TupleStructure>().children) structures.push_back(w.write(c));
  } else {
    structures.push_back(w.write(st));
  }

  json doc;
  doc["format_version"] = std::string(kFormatVersion);
  doc["points"] = s.space.labels();
  doc["metric"] = json{{"matrix", s.space.matrix()}};
  if (s.origin) doc["origin"] = s.space.label(*s.origin);
  if (!w.marks.empty()) {
    json ms = json::object();
    for (std::size_t i = 0; i < w.marks.size(); ++i) {
      ms["marks" + std::to_string(i)] = json{{"labels", w.marks[i].space().labels()}, {"matrix", w.marks[i].space().matrix()}};
    }
    doc["mark_spaces"] = ms;
  }
  doc["structures"] = structures;
  return doc.dump(2) + "\n";
}

}  // namespace ghforge
