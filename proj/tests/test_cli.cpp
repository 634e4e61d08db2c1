#include "ultra/commands.hpp"
#include "ultra/config.hpp"

#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace ultra;

namespace {

const char* const kFixtures[] = {"example1", "example2", "example2_negative", "example3",
                                 "broken_map", "two_vertex", "single_interval"};

std::string fixture_path(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name + ".cfg"; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int code = -1;
  std::string out;
};

Run run_cli(const std::string& args) {
  std::string cmd = std::string(CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p))
    r.out.append(buf.data(), n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

ConfigError config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("no ConfigError for:\n" << text);
  return ConfigError(0, 0, "");
}

} // namespace

TEST_CASE("Example 1 fixture parses to the expected map") {
  Workspace ws = load_config(fixture_path("example1"));
  REQUIRE(ws.map);
  MarkovMap m;
  m.ambient_lo = 0;
  m.intervals = {Interval::closed(0, 1)};
  m.pieces = {{Interval::closed(0, 1), 3, 0}};
  m.family = IntervalFamily{2, FamilyExpr::linear(-2, 2), FamilyExpr::linear(-1, 2)};
  m.map_families = {MapFamily{2, 1,
                              {{FamilyExpr::linear(-2, 2), FamilyExpr::linear(-1, 2), true, true, 1,
                                FamilyExpr(-2)}},
                              {}}};
  m.finalize();
  CHECK(*ws.map == m);
  CHECK(ws.run.X == VertexSet::tail(2));
  CHECK(ws.run.x == Rational(1, 2));
  CHECK_FALSE(ws.graph);
}

TEST_CASE("decimal literals are rejected") {
  ConfigError e = config_error("[map]\nambient = [0, 2)\ninterval 1 = [0, 0.5]\n");
  CHECK(e.line() == 3);
  CHECK(e.column() == 19);
  CHECK(std::string(e.what()).find("p/q") != std::string::npos);
  CHECK_NOTHROW(parse_config("[map]\nambient = [0, 2)\ninterval 1 = [0, 1/2]\non [0, 1/2]: 2x\n"));
}

TEST_CASE("colliding edge ids are a semantic error") {
  ConfigError e = config_error("[ultragraph]\nedge e2: v2 -> {1}\nfamily n>=2: e_n: v_n -> offsets{-1}\n");
  CHECK(e.line() == 1);
  CHECK(std::string(e.what()).find("e2") != std::string::npos);
}

TEST_CASE("unknown keys and sections are rejected") {
  CHECK(config_error("[run]\ndepht = 3\n").line() == 2);
  CHECK(config_error("[runs]\n").line() == 1);
  CHECK(config_error("[map]\nslope = 3\n").line() == 2);
  CHECK(config_error("depth = 3\n").line() == 1);
}

TEST_CASE("scope parameters must be positive") {
  CHECK(config_error("[run]\ndepth = 0\n").line() == 2);
  CHECK(config_error("[run]\nhorizon = -3\n").line() == 2);
}

TEST_CASE("X outside Reg(G) is reported at the X line") {
  ConfigError e = config_error("[ultragraph]\nvertices = {1,2}\nedge e1: v1 -> {2}\n[run]\nX = {2}\n");
  CHECK(e.line() == 5);
  CHECK(std::string(e.what()).find("Reg") != std::string::npos);
}

TEST_CASE("affine expressions") {
  AffineExpr a = parse_affine("3x-2n-3");
  CHECK(a.slope == 3);
  CHECK(a.intercept == FamilyExpr::linear(-3, -2));
  CHECK(a.to_string() == "3x-2n-3");
  AffineExpr b = parse_affine("3-4*(1/2)^n");
  CHECK(b.slope == 0);
  CHECK(b.intercept.at(3) == Rational(5, 2));
  CHECK(parse_affine("(5/2)x").to_string() == "(5/2)x");
  CHECK(parse_affine("x-2").to_string() == "x-2");
  CHECK_THROWS(parse_affine("x*x"));
  CHECK_THROWS(parse_affine("2^x"));
}

TEST_CASE("emit then parse is the identity") {
  for (const char* name : kFixtures) {
    CAPTURE(name);
    Workspace ws = load_config(fixture_path(name));
    std::string text = emit(ws);
    CHECK(parse_config(text) == ws);
    CHECK(emit(parse_config(text)) == text);
  }
}

TEST_CASE("exit codes") {
  CHECK(run_cli("--config " + fixture_path("example1") + " injectivity").code == 0);
  Run neg = run_cli("--config " + fixture_path("example2_negative") + " injectivity");
  CHECK(neg.code == 1);
  CHECK(neg.out.find("fails  injectivity.cond3 [v2]") != std::string::npos);
  Run broken = run_cli("--config " + fixture_path("broken_map") + " validate");
  CHECK(broken.code == 1);
  CHECK(broken.out.find("markov.condition3 [I1]  witness: x=5/2") != std::string::npos);
  CHECK(run_cli("--config " + fixture_path("two_vertex") + " injectivity").code == 3);
  CHECK(run_cli("--config /nonexistent.cfg validate").code == 3);
  CHECK(run_cli("--config " + fixture_path("example1") + " frobnicate").code == 3);
}

TEST_CASE("undetermined results give exit code 2") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "ultra_cli_test";
  fs::create_directories(dir);
  std::string cfg = (dir / "stuck.cfg").string();
  // x = 0 is a fixed point of 3x
  std::string text = slurp(fixture_path("example1"));
  text.replace(text.find("x = 1/2"), 7, "x = 0");
  std::ofstream(cfg, std::ios::trunc) << text;
  CHECK(run_cli("--config " + cfg + " validate").code == 2);
}

TEST_CASE("flags override the run section") {
  Run a = run_cli("--config " + fixture_path("example1") + " validate --depth 2 --format records");
  CHECK(a.code == 0);
  CHECK(a.out.find("\"name\":\"orbit.tree\"") != std::string::npos);
  CHECK(a.out.find("depth <= 2") != std::string::npos);
}

TEST_CASE("matrix export") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "ultra_export_test";
  fs::remove_all(dir);
  Run r = run_cli("--config " + fixture_path("example1") + " markov-rep --depth 3 --export-matrices " +
                  dir.string());
  CHECK(r.code == 0);
  std::string basis = slurp((dir / "basis.txt").string());
  CHECK(basis.find("0 1/2 1 1\n") != std::string::npos);
  std::string s2 = slurp((dir / "s_e2.coo").string());
  // T_e2 sends 1/2 (index 0) to 5/2 (index 2)
  CHECK(s2.find("2 0 1\n") != std::string::npos);
}

TEST_CASE("reports match the golden files") {
  for (const char* name : kFixtures) {
    CAPTURE(name);
    Run r = run_cli("--config " + fixture_path(name) + " all --format records");
    std::string golden = slurp(std::string(FIXTURE_DIR) + "/../golden/" + name + ".jsonl");
    CHECK(!golden.empty());
    CHECK(r.out == golden);
  }
}

TEST_CASE("records are sorted by name then index") {
  Report r = run_command("validate", load_config(fixture_path("example3")));
  auto sorted = r.sorted();
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    const CheckRecord &a = sorted[k - 1], &b = sorted[k];
    CHECK((a.name < b.name || (a.name == b.name && a.index <= b.index)));
  }
  CHECK(r.records_jsonl() == run_command("validate", load_config(fixture_path("example3"))).records_jsonl());
}
