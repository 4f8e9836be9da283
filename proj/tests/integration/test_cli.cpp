#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + GHFORGE_BIN + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string fixture(const std::string& name) { return std::string(GHFORGE_DATA) + "/fixtures/" + name; }

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / "ghforge_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  const auto path = scratch() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("validate") {
  const auto ok = run("validate " + fixture("triangle_345.json"));
  CHECK(ok.code == 0);
  CHECK(ok.out.rfind("valid: 3 points", 0) == 0);

  const auto bad = write("dangling.json", R"({"format_version": "1.0", "points": ["a"], "metric": {"matrix": [[0]]},
    "structures": [{"kind": "subset", "members": ["b"]}]})");
  const auto r = run("validate " + bad);
  CHECK(r.code == 1);
  CHECK(r.out.find("DanglingLabel") != std::string::npos);
  CHECK(r.out.find("/structures/0/members/0") != std::string::npos);
}

TEST_CASE("dist of a document with itself is zero for every metric") {
  for (const char* metric : {"gh", "ghp", "cgf", "pointed", "integral"}) {
    const auto r = run(std::string("dist ") + fixture("triangle_345.json") + " " + fixture("triangle_345.json") +
                       " --metric " + metric);
    CHECK_MESSAGE(r.code == 0, metric);
    CHECK_MESSAGE(r.out == "0\n", metric);
  }
}

TEST_CASE("dist values and witnesses") {
  const auto a = fixture("two_point.json"), b = fixture("one_point.json");
  CHECK(run("dist " + a + " " + b + " --metric gh").out == "1\n");
  CHECK(run("dist " + a + " " + b + " --metric pointed").out == "0.5\n");
  CHECK(run("dist " + a + " " + b + " --metric integral").out == "0.135335283237\n");

  const auto w = run("dist " + a + " " + b + " --witness");
  REQUIRE(w.code == 0);
  const auto nl = w.out.find('\n');
  CHECK(w.out.substr(0, nl) == "1");
  const auto j = nlohmann::json::parse(w.out.substr(nl + 1));
  CHECK(j["verified"] == true);
  CHECK(j["correspondence"].size() == 2);
}

TEST_CASE("oracle") {
  const auto a = fixture("two_point.json"), b = fixture("one_point.json");
  const auto r = run("oracle " + a + " " + b);
  CHECK(r.code == 0);
  CHECK(r.out == "oracle 1\nfast 1\nagree yes\n");
  const auto forced = run("oracle " + a + " " + b + " --tol -1");
  CHECK(forced.code == 5);
  CHECK(forced.out.find("agree no") != std::string::npos);
}

TEST_CASE("cover, ball and matrix") {
  const auto tri = fixture("triangle_345.json");
  CHECK(run("cover " + tri + " --eps 5").out == "1\n");
  CHECK(run("cover " + tri + " --eps 1 --exact").out == "3\n");

  const auto ball = run("ball " + tri + " --radius 3");
  REQUIRE(ball.code == 0);
  const auto doc = nlohmann::json::parse(ball.out);
  CHECK(doc["points"] == nlohmann::json::array({"a", "b"}));

  const auto m = run("matrix " + std::string(GHFORGE_DATA) + "/fixtures --metric gh --jobs 2");
  CHECK(m.code == 0);
  CHECK(m.out.rfind("file,one_point.json,triangle_345.json,two_point.json\n", 0) == 0);
  CHECK(m.out.find("one_point.json,0,2.5,1\n") != std::string::npos);
}

TEST_CASE("seq") {
  const auto r = run("seq " + std::string(GHFORGE_DATA) + "/sequences/rescaled --order numeric --radii 0.1,0.5");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["files"][0] == "x1.json");
  CHECK(j["files"][7] == "x8.json");
  CHECK(j["cauchy"] == true);
  CHECK(j["traces"].size() == 2);
  CHECK(j["consecutive"].size() == 7);
}

TEST_CASE("exit codes") {
  const auto a = fixture("two_point.json"), b = fixture("one_point.json");
  CHECK(run("dist " + a + " /nonexistent.json").code == 2);
  CHECK(run("dist " + a).code == 2);
  CHECK(run("dist " + a + " " + b + " --metric nope").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("dist " + a + " " + b, "GHFORGE_GUARD=abc").code == 2);

  const auto point = write("point.json", R"({"format_version": "1.0", "points": ["a"], "metric": {"matrix": [[0]]},
    "structures": [{"kind": "point", "at": "a"}]})");
  const auto subset = write("subset.json", R"({"format_version": "1.0", "points": ["a"], "metric": {"matrix": [[0]]},
    "structures": [{"kind": "subset", "members": ["a"]}]})");
  CHECK(run("dist " + point + " " + subset).code == 3);
  CHECK(run("dist " + a + " " + b + " --metric ghp").code == 3);
  const auto broken = write("broken.json", "{");
  CHECK(run("dist " + broken + " " + b).code == 3);

  CHECK(run("dist " + a + " " + b, "GHFORGE_GUARD=2").code == 4);
  CHECK(run("dist " + a + " " + b, "GHFORGE_GUARD=3").code == 0);
}
