#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "fwbb/io.hpp"
#include "support/oracles.hpp"

using namespace fwbb;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + FWBB_CLI_PATH + "\" " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("fwbb_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("generate is deterministic for a fixed seed") {
  TempDir dir;
  REQUIRE(run_cli("generate gip --n 10 --seed 7 --out " + (dir / "a.json")).code == 0);
  REQUIRE(run_cli("generate gip --n 10 --seed 7 --out " + (dir / "b.json")).code == 0);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  REQUIRE(run_cli("generate gip --n 10 --seed 8 --out " + (dir / "c.json")).code == 0);
  CHECK(slurp(dir / "a.json") != slurp(dir / "c.json"));
}

TEST_CASE("generated instances load") {
  TempDir dir;
  REQUIRE(run_cli("generate oedp --m 60 --n 8 --seed 1 --out " + (dir / "o.json")).code == 0);
  const auto o = load_instance(dir / "o.json");
  const auto& inst = std::get<OEDPInstance>(o.payload);
  CHECK(inst.m == 60);
  CHECK(inst.n == 8);
  REQUIRE(run_cli("generate network --nodes 5 --seed 3 --out " + (dir / "n.json")).code == 0);
  const auto n = load_instance(dir / "n.json");
  CHECK(std::get<NetworkDesignInstance>(n.payload).num_nodes == 5);
  CHECK_NOTHROW(prepare_run(n));  // every demand is routable
  REQUIRE(run_cli("generate quadratic --n 4 --box 2 --seed 2 --out " + (dir / "q.json")).code == 0);
  CHECK(std::get<QuadraticInstance>(load_instance(dir / "q.json").payload).n == 4);
}

TEST_CASE("run solves a tiny quadratic to the enumerated optimum") {
  TempDir dir;
  REQUIRE(run_cli("generate quadratic --n 3 --box 3 --seed 5 --out " + (dir / "q.json")).code == 0);
  const auto file = load_instance(dir / "q.json");
  const auto& q = std::get<QuadraticInstance>(file.payload);
  const auto r = run_cli("run " + (dir / "q.json") + " --out " + (dir / "res") +
                         " --set branch_and_bound.rel_gap=0 --set branch_and_bound.abs_gap=1e-7");
  CHECK(r.code == 0);
  CHECK(r.out.find("OptimalReached") != std::string::npos);
  const auto doc = nlohmann::json::parse(slurp(fs::path(dir / "res") / "solution.json"));
  double best = oracle::kInf;
  oracle::for_each_integer_point(std::vector<int>(3, 0), std::vector<int>(3, 3),
                                 [&](const Vector& p) { best = std::min(best, quadratic_objective(q, p)); });
  CHECK(doc["objective"].get<double>() == doctest::Approx(best).epsilon(1e-6));
  const auto csv = slurp(fs::path(dir / "res") / "trace.csv");
  CHECK(csv.rfind("time_s,nodes,lb,ub\n", 0) == 0);
}

TEST_CASE("run reports the Petersen verdict") {
  TempDir dir;
  InstanceFile f;
  GraphIsomorphismInstance g;
  g.n = 10;
  g.a = adjacency_from_edges(10, petersen_edges());
  g.b = relabel(g.a, 10, petersen_relabeling());
  f.payload = g;
  std::ofstream(dir / "p.json") << serialize_instance(f);
  const auto r = run_cli("run " + (dir / "p.json") + " --out " + (dir / "res"));
  CHECK(r.code == 0);
  CHECK(r.out.find("isomorphic") != std::string::npos);
  CHECK(r.out.find("non-isomorphic") == std::string::npos);
  const auto doc = nlohmann::json::parse(slurp(fs::path(dir / "res") / "solution.json"));
  CHECK(doc["verdict"] == "isomorphic");
}

TEST_CASE("a tight time limit exits 2 and still writes a trace") {
  TempDir dir;
  REQUIRE(run_cli("generate quadratic --n 40 --box 5 --seed 9 --out " + (dir / "big.json")).code == 0);
  const auto r = run_cli("run " + (dir / "big.json") + " --time-limit 0.001 --out " + (dir / "res"));
  CHECK(r.code == 2);
  const auto csv = slurp(fs::path(dir / "res") / "trace.csv");
  CHECK(csv.find('\n') + 1 < csv.size());  // at least one data row
}

TEST_CASE("bad input exits 1 with a message") {
  TempDir dir;
  std::ofstream(dir / "bad.json") << R"({"kind": "quadratic", "n": "two"})";
  const auto r = run_cli("run " + (dir / "bad.json"));
  CHECK(r.code == 1);
  CHECK(r.out.find("$.n") != std::string::npos);
  CHECK(run_cli("run " + (dir / "bad.json") + " --set nonsense=1").code == 1);
}
