#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ghforge/document.hpp"
#include "ghforge/gh_compact.hpp"
#include "ghforge/gh_pointed.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace ghforge;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kUsage = 2, kSchema = 3, kGuard = 4, kDisagree = 5 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json num(double v) {
  if (std::isinf(v)) return "inf";
  return json::parse(fmt(v));
}

std::size_t guard_or(std::size_t fallback) {
  if (const char* env = std::getenv("GHFORGE_GUARD")) {
    try {
      const long long g = std::stoll(env);
      if (g > 0) return static_cast<std::size_t>(g);
    } catch (...) {
    }
    throw UsageError("GHFORGE_GUARD must be a positive integer");
  }
  return fallback;
}

StructuredSpace load(const std::string& path) {
  if (!fs::is_regular_file(path)) throw UsageError("no such file: " + path);
  return load_space(path);
}

std::vector<std::string> documents_in(const std::string& dir) {
  if (!fs::is_directory(dir)) throw UsageError("no such directory: " + dir);
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path().string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

PointedStructuredSpace pointed(const StructuredSpace& s, const std::string& name) {
  if (!s.origin) throw Error(Errc::SchemaError, name + " has no origin at /origin");
  return PointedStructuredSpace(s);
}

FiniteMeasure measure_of(const StructuredSpace& s, const std::string& name) {
  if (s.structure.kind() != StructureKind::Measure) {
    throw Error(Errc::SignatureMismatch, name + " must carry exactly one measure structure for ghp");
  }
  return FiniteMeasure(s.space, s.structure.as<MeasureStructure>().weights);
}

struct Distance {
  double value;
  std::optional<Witness> witness;
};

Distance compute(const std::string& metric, const StructuredSpace& a, const StructuredSpace& b,
                 const std::string& name_a, const std::string& name_b, bool witness) {
  CompactOptions compact;
  compact.guard = guard_or(kEnumerationGuard);
  compact.want_witness = witness;
  PointedOptions po;
  po.guard = compact.guard;
  if (metric == "gh") {
    auto r = gh_distance(a.space, b.space, compact);
    return {r.value, r.witness};
  }
  if (metric == "ghp") {
    auto r = ghp_distance(a.space, measure_of(a, name_a), b.space, measure_of(b, name_b), compact);
    return {r.value, r.witness};
  }
  if (metric == "cgf") {
    auto r = cgf_distance(a, b, compact);
    return {r.value, r.witness};
  }
  if (metric == "pointed") return {pointed_distance(pointed(a, name_a), pointed(b, name_b), po), std::nullopt};
  return {integral_distance(pointed(a, name_a), pointed(b, name_b), po), std::nullopt};
}

json witness_json(const Witness& w, bool verified) {
  json pairs = json::array();
  for (auto [i, j] : w.relation.pairs()) pairs.push_back({w.relation.left().label(i), w.relation.right().label(j)});
  json certs = json::array();
  for (const auto& c : w.certificates) {
    json matches = json::array();
    for (auto [i, j] : c.matches) matches.push_back({i, j});
    json transport = json::array();
    for (auto [i, j, m] : c.transport) transport.push_back({i, j, num(m)});
    certs.push_back(json{{"path", c.path},
                         {"kind", c.kind},
                         {"threshold", num(c.threshold)},
                         {"holds", c.holds},
                         {"matches", matches},
                         {"transport", transport}});
  }
  return json{{"correspondence", pairs}, {"certificates", certs}, {"verified", verified}};
}

int run_validate(const std::string& file) {
  try {
    const auto s = load(file);
    std::cout << "valid: " << s.space.size() << " points, structure " << signature(s.structure)
              << (s.origin ? ", origin " + s.space.label(*s.origin) : std::string()) << "\n";
    return kOk;
  } catch (const Error& e) {
    std::cout << "invalid: " << e.what() << "\n";
    return kInvalid;
  }
}

int run_dist(const std::string& fa, const std::string& fb, const std::string& metric, double tol, bool witness) {
  const auto a = load(fa), b = load(fb);
  auto d = compute(metric, a, b, fa, fb, witness);
  std::cout << fmt(d.value) << "\n";
  if (witness) {
    if (d.witness) {
      bool verified = true;
      if (metric == "cgf" || metric == "gh" || metric == "ghp") {
        const StructuredSpace x = metric == "gh" ? StructuredSpace(a.space, Structure::none()) : a;
        const StructuredSpace y = metric == "gh" ? StructuredSpace(b.space, Structure::none()) : b;
        verified = feasible_at(x, y, d.witness->relation, d.value + tol).feasible;
      }
      std::cout << witness_json(*d.witness, verified).dump(2) << "\n";
    } else {
      std::cout << "null\n";
    }
  }
  return kOk;
}

int run_oracle(const std::string& fa, const std::string& fb, double tol) {
  const auto a = load(fa), b = load(fb);
  const auto slow = oracle_cgf(a, b, guard_or(10));
  CompactOptions compact;
  compact.guard = guard_or(kEnumerationGuard);
  compact.want_witness = false;
  const auto fast = cgf_distance(a, b, compact);
  const bool agree = (std::isinf(slow.value) && std::isinf(fast.value)) || std::abs(slow.value - fast.value) <= tol;
  std::cout << "oracle " << fmt(slow.value) << "\nfast " << fmt(fast.value) << "\nagree " << (agree ? "yes" : "no")
            << "\n";
  return agree ? kOk : kDisagree;
}

int run_matrix(const std::string& dir, const std::string& metric, std::size_t jobs) {
  const auto files = documents_in(dir);
  std::vector<StructuredSpace> spaces;
  for (const auto& f : files) spaces.push_back(load(f));
  const std::size_t n = spaces.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex lock;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= pairs.size()) return;
      const auto [i, j] = pairs[k];
      try {
        d[i][j] = d[j][i] = compute(metric, spaces[i], spaces[j], files[i], files[j], false).value;
      } catch (...) {
        std::lock_guard g(lock);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::max<std::size_t>(1, jobs); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::cout << "file";
  for (const auto& f : files) std::cout << "," << fs::path(f).filename().string();
  std::cout << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    std::cout << fs::path(files[i]).filename().string();
    for (std::size_t j = 0; j < n; ++j) std::cout << "," << fmt(d[i][j]);
    std::cout << "\n";
  }
  return kOk;
}

int run_ball(const std::string& file, double radius) {
  const auto s = load(file);
  const auto ball = pcball(pointed(s, file), radius);
  std::cout << serialize_space(ball.as_structured());
  return kOk;
}

long long first_number(const std::string& name) {
  std::size_t i = 0;
  while (i < name.size() && !std::isdigit(static_cast<unsigned char>(name[i]))) ++i;
  if (i == name.size()) return -1;
  std::size_t j = i;
  while (j < name.size() && std::isdigit(static_cast<unsigned char>(name[j]))) ++j;
  return std::stoll(name.substr(i, j - i));
}

int run_seq(const std::string& dir, const std::string& order, const std::vector<double>& radii, double threshold,
            std::size_t jobs) {
  auto files = documents_in(dir);
  if (order == "numeric") {
    std::stable_sort(files.begin(), files.end(), [](const std::string& x, const std::string& y) {
      return first_number(fs::path(x).filename().string()) < first_number(fs::path(y).filename().string());
    });
  }
  std::vector<PointedStructuredSpace> spaces;
  for (const auto& f : files) spaces.push_back(pointed(load(f), f));
  SequenceOptions options;
  options.radius_grid = radii;
  options.cauchy_threshold = threshold;
  options.jobs = jobs;
  options.pointed.guard = guard_or(kEnumerationGuard);
  const auto rep = sequence_report(spaces, options);

  auto matrix = [](const std::vector<std::vector<double>>& m) {
    json out = json::array();
    for (const auto& row : m) {
      json r = json::array();
      for (double v : row) r.push_back(num(v));
      out.push_back(r);
    }
    return out;
  };
  json names = json::array();
  for (const auto& f : files) names.push_back(fs::path(f).filename().string());
  json consecutive = json::array();
  for (double v : rep.consecutive) consecutive.push_back(num(v));
  json traces = json::array();
  for (std::size_t k = 0; k < radii.size(); ++k) {
    json values = json::array();
    for (double v : rep.traces[k]) values.push_back(num(v));
    traces.push_back(json{{"radius", num(radii[k])}, {"distances", values}});
  }
  json out{{"files", names},
           {"pointed", matrix(rep.pointed)},
           {"integral", matrix(rep.integral)},
           {"consecutive", consecutive},
           {"tail_sum", num(rep.tail_sum)},
           {"cauchy_threshold", num(threshold)},
           {"cauchy", rep.cauchy},
           {"traces", traces}};
  std::cout << out.dump(2) << "\n";
  return kOk;
}

int run_cover(const std::string& file, double eps, bool exact) {
  const auto s = load(file);
  const std::size_t guard = exact ? std::numeric_limits<std::size_t>::max() : guard_or(24);
  const auto c = covering_number(s.space, eps, guard);
  std::cout << c.count << "\n";
  if (!c.exact) std::cerr << "note: greedy upper bound (" << s.space.size() << " points exceed the exact guard)\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ghforge: Gromov-Hausdorff distances for structured finite metric spaces"};
  app.require_subcommand(1);

  std::string file_a, file_b, dir, metric = "cgf", order = "lexical";
  double tol = 1e-9, radius = 0.0, eps = 0.0, threshold = 0.1;
  bool witness = false, exact = false;
  std::size_t jobs = 1;
  std::vector<double> radii;
  const std::vector<std::string> metrics{"gh", "ghp", "cgf", "pointed", "integral"};

  auto* validate = app.add_subcommand("validate", "check a SpaceDocument");
  validate->add_option("file", file_a)->required();

  auto* dist = app.add_subcommand("dist", "distance between two documents");
  dist->add_option("fileA", file_a)->required();
  dist->add_option("fileB", file_b)->required();
  dist->add_option("--metric", metric)->check(CLI::IsMember(metrics));
  dist->add_option("--tol", tol, "slack for verifying the witness")->check(CLI::NonNegativeNumber);
  dist->add_flag("--witness", witness);

  auto* oracle = app.add_subcommand("oracle", "exhaustive oracle value and agreement with the fast path");
  oracle->add_option("fileA", file_a)->required();
  oracle->add_option("fileB", file_b)->required();
  oracle->add_option("--tol", tol, "agreement tolerance; a negative value forces disagreement");

  auto* matrix = app.add_subcommand("matrix", "CSV distance matrix over the documents in a directory");
  matrix->add_option("dir", dir)->required();
  matrix->add_option("--metric", metric)->check(CLI::IsMember(metrics));
  matrix->add_option("--jobs", jobs)->check(CLI::PositiveNumber);

  auto* ball = app.add_subcommand("ball", "truncated ball around the origin");
  ball->add_option("file", file_a)->required();
  ball->add_option("--radius", radius)->required()->check(CLI::NonNegativeNumber);

  auto* seq = app.add_subcommand("seq", "sequence report over the documents in a directory");
  seq->add_option("dir", dir)->required();
  seq->add_option("--order", order)->check(CLI::IsMember({"lexical", "numeric"}));
  seq->add_option("--radii", radii, "radius grid for ball-distance traces")->delimiter(',');
  seq->add_option("--threshold", threshold, "Cauchy threshold for the tail sum")->check(CLI::NonNegativeNumber);
  seq->add_option("--jobs", jobs)->check(CLI::PositiveNumber);

  auto* cover = app.add_subcommand("cover", "covering number");
  cover->add_option("file", file_a)->required();
  cover->add_option("--eps", eps)->required()->check(CLI::NonNegativeNumber);
  cover->add_flag("--exact", exact);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*validate) return run_validate(file_a);
    if (*dist) return run_dist(file_a, file_b, metric, tol, witness);
    if (*oracle) return run_oracle(file_a, file_b, tol);
    if (*matrix) return run_matrix(dir, metric, jobs);
    if (*ball) return run_ball(file_a, radius);
    if (*seq) return run_seq(dir, order, radii, threshold, jobs);
    if (*cover) return run_cover(file_a, eps, exact);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::TooLarge ? kGuard : kSchema;
  }
  return kUsage;
}
