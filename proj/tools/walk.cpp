// walk: command-line front end for the scattering-walk search simulator.
//
//   walk run    --n 100 --k 2 --phase pi/2 --steps auto --engine reduced --out r.csv
//   walk stats  --k 4 --runs 3 --mode exact
//   walk verify --profile strict

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "qwalk/experiment.hpp"

int main(int argc, char** argv) {
  using namespace qwalk;

  CLI::App app{"Scattering quantum walk search on complete graphs"};
  app.require_subcommand(1);

  ExperimentSpec spec;
  std::optional<std::size_t> n;
  std::string n_range, marked_list, steps = "auto";
  std::optional<std::size_t> k;
  Engine engine = Engine::reduced;
  OutputFormat format = OutputFormat::csv;
  StatsMode mode = StatsMode::exact;

  const std::map<std::string, Engine> engines{
      {"full", Engine::full}, {"reduced", Engine::reduced}, {"oracle", Engine::oracle}};
  const std::map<std::string, OutputFormat> formats{{"csv", OutputFormat::csv},
                                                    {"json", OutputFormat::json}};
  const std::map<std::string, StatsMode> modes{{"exact", StatsMode::exact},
                                               {"mc", StatsMode::mc}};

  auto* run = app.add_subcommand("run", "Evolve the walk and export per-step records");
  run->add_option("--n", n, "Number of vertices N");
  run->add_option("--n-range", n_range, "Sweep over N as a:b:step (inclusive)");
  run->add_option("--k", k, "Number of marked vertices K (marked set {0..K-1})");
  run->add_option("--marked-list", marked_list, "Explicit marked vertices, e.g. 0,4,7");
  run->add_option("--phase", spec.phase_token, "Phase: pi, pi/2, pi/4, ... or radians")
      ->capture_default_str();
  run->add_option("--steps", steps, "Step count or 'auto' (optimal, phase pi/2 only)")
      ->capture_default_str();
  run->add_option("--engine", engine, "full | reduced | oracle")
      ->transform(CLI::CheckedTransformer(engines, CLI::ignore_case));
  run->add_option("--seed", spec.seed, "Seed (recorded in output)");
  run->add_option("--out", spec.out, "Output file (default: stdout)");
  run->add_option("--format", format, "csv | json")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));

  auto* stats = app.add_subcommand("stats", "Marked-vertex discovery over repeated runs");
  stats->add_option("--k", k, "Number of marked vertices K")->required();
  stats->add_option("--runs", spec.runs, "Number of search runs")->capture_default_str();
  stats->add_option("--mode", mode, "exact | mc")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  stats->add_option("--n", n, "Graph size for mc mode");
  stats->add_option("--trials", spec.trials, "Monte Carlo trials")->capture_default_str();
  stats->add_option("--engine", engine, "mc engine: reduced | oracle")
      ->transform(CLI::CheckedTransformer(engines, CLI::ignore_case));
  stats->add_option("--seed", spec.seed, "Monte Carlo seed");
  stats->add_option("--out", spec.out, "Output file");
  stats->add_option("--format", format, "csv | json")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));

  VerifyOptions verify_options;
  std::string profile = "default", fault = "none";
  auto* verify = app.add_subcommand("verify", "Run the invariant suites");
  verify->add_option("--profile", profile, "default | strict")
      ->check(CLI::IsMember({"default", "strict"}));
  verify->add_option("--inject-fault", fault, "none | reflection (breaks r + t = 1)")
      ->check(CLI::IsMember({"none", "reflection"}));
  verify->add_option("--seed", verify_options.seed, "Seed for random test states");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  spec.n_vertices = n;
  spec.k_marked = k;
  spec.engine = engine;
  spec.format = format;
  spec.mode = mode;

  if (*verify) {
    verify_options.profile =
        profile == "strict" ? ToleranceProfile::strict : ToleranceProfile::standard;
    verify_options.fault = fault == "reflection" ? Fault::reflection : Fault::none;
    return cmd_verify(verify_options, std::cout);
  }

  try {
    if (!n_range.empty()) spec.n_range = parse_range(n_range);
    if (!marked_list.empty()) spec.marked_list = parse_marked_list(marked_list);
    if (steps != "auto") spec.steps = detail::parse_count(steps, "steps");
  } catch (const InvalidSpec& e) {
    std::cerr << "walk: " << e.what() << '\n';
    return kExitInvalidInput;
  }

  if (*stats) {
    if (!stats->count("--engine")) spec.engine = Engine::reduced;
    return cmd_stats(spec, std::cout, std::cerr);
  }
  return cmd_run(spec, std::cout, std::cerr);
}
