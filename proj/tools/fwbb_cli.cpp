#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fwbb/errors.hpp"
#include "fwbb/io.hpp"

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fwbb::SolverError(fwbb::ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << text;
}

struct RunArgs {
  std::string instance;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  std::optional<double> time_limit;
  std::optional<long> node_limit;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
};

int run_command(const RunArgs& args) {
  const fwbb::InstanceFile file = fwbb::load_instance(args.instance);
  fwbb::PreparedRun run = fwbb::prepare_run(file);
  for (const std::string& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw fwbb::SolverError(fwbb::ErrorKind::SchemaError, kv + ": expected key=value");
    fwbb::apply_override(run.settings, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (args.time_limit) run.settings.branch_and_bound.tolerances.time_limit_s = *args.time_limit;
  if (args.node_limit) run.settings.branch_and_bound.tolerances.node_limit = *args.node_limit;
  if (args.seed) run.settings.seed = *args.seed;
  if (args.verbose) run.settings.branch_and_bound.verbose = true;

  const fwbb::SolveOutput out = fwbb::solve(run.problem, run.settings);
  std::filesystem::create_directories(args.out_dir);
  write_file(std::filesystem::path(args.out_dir) / "solution.json", fwbb::solution_json(file, out));
  write_file(std::filesystem::path(args.out_dir) / "trace.csv", fwbb::trace_csv(out.result.trace));
  std::cout << fwbb::summary_line(file, out) << '\n';
  return fwbb::exit_code(file, out.result);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed-integer convex optimization by Frank-Wolfe branch-and-bound"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Solve an instance file");
  run->add_option("instance", run_args.instance, "Instance file (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", run_args.out_dir, "Directory for solution.json and trace.csv");
  run->add_option("--set", run_args.overrides, "Settings override key=value (repeatable)");
  run->add_option("--time-limit", run_args.time_limit, "Time limit in seconds")->check(CLI::NonNegativeNumber);
  run->add_option("--node-limit", run_args.node_limit, "Maximum number of processed nodes")->check(CLI::PositiveNumber);
  run->add_option("--seed", run_args.seed, "Seed for randomized heuristics");
  run->add_flag("--verbose", run_args.verbose, "Print one line per node");

  std::string kind, out_path;
  std::uint64_t seed = 0;
  std::size_t n = 10, m = 60, nodes = 8, destinations = 2, sources = 2;
  int box = 1;
  double budget = 0.0, max_upper = 5.0, radius = 0.5;
  std::string criterion = "A";
  bool isomorphic = true;
  auto* gen = app.add_subcommand("generate", "Write a random instance file");
  gen->add_option("kind", kind, "quadratic, gip, oedp or network")
      ->required()
      ->check(CLI::IsMember({"quadratic", "gip", "oedp", "network"}));
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--out", out_path, "Output file")->required();
  gen->add_option("--n", n, "quadratic: variables; gip: vertices; oedp: parameters");
  gen->add_option("--box", box, "quadratic: integer upper bound of every variable");
  gen->add_option("--m", m, "oedp: number of candidate experiments");
  gen->add_option("--budget", budget, "oedp: number of experiments to choose (default 1.5 n, rounded)");
  gen->add_option("--max-upper", max_upper, "oedp: largest per-experiment bound");
  gen->add_option("--criterion", criterion, "oedp: A or D")->check(CLI::IsMember({"A", "D"}));
  gen->add_option("--isomorphic", isomorphic, "gip: second graph is a relabeling of the first");
  gen->add_option("--nodes", nodes, "network: number of nodes");
  gen->add_option("--destinations", destinations, "network: number of destinations");
  gen->add_option("--sources", sources, "network: sources per destination");
  gen->add_option("--radius", radius, "network: candidate arc radius");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(run_args);

    fwbb::InstanceFile file;
    if (kind == "quadratic") {
      if (box < 1) throw fwbb::SolverError(fwbb::ErrorKind::InvalidArgument, "--box must be at least 1");
      file.payload = fwbb::generate_quadratic(n, box, seed);
    } else if (kind == "gip") {
      fwbb::GraphIsomorphismInstance inst;
      inst.n = n;
      inst.a = fwbb::random_cubic_graph(n, seed);
      inst.b = isomorphic ? fwbb::relabel(inst.a, n, fwbb::random_permutation(n, seed + 1))
                          : fwbb::random_cubic_graph(n, seed + 1);
      file.payload = std::move(inst);
    } else if (kind == "oedp") {
      const double b = budget > 0.0 ? budget : std::round(1.5 * static_cast<double>(n));
      file.payload = fwbb::generate_oedp(m, n, b, max_upper,
                                         criterion == "D" ? fwbb::OEDPCriterion::D : fwbb::OEDPCriterion::A, seed);
    } else {
      file.payload = fwbb::generate_network_design(nodes, destinations, sources, radius, seed);
    }
    // Validate exactly as a later `run` would.
    const std::string text = fwbb::serialize_instance(file);
    fwbb::parse_instance(text);
    write_file(out_path, text);
    return 0;
  } catch (const fwbb::SolverError& e) {
    std::cerr << "error [" << fwbb::to_string(e.kind()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
