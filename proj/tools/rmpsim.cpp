// rmpsim: scenario simulation, strategy comparison, and property-suite
// runner for the rmpkit library.
//
// Exit codes: 0 success, 2 collision, 3 timeout, 4 configuration error,
// 5 divergence.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "rmp/rmp.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitCollision = 2;
constexpr int kExitTimeout = 3;
constexpr int kExitConfig = 4;
constexpr int kExitDivergence = 5;

int verdict_exit_code(rmp::Verdict v) {
  switch (v) {
    case rmp::Verdict::Success: return kExitSuccess;
    case rmp::Verdict::Collision: return kExitCollision;
    case rmp::Verdict::Timeout: return kExitTimeout;
    case rmp::Verdict::Divergence: return kExitDivergence;
  }
  return kExitConfig;
}

struct SimulateOptions {
  std::string scenario_path;
  std::string out_dir;
  std::string strategy;
  double dt = 0.0;
  int steps = 0;
  std::int64_t seed = -1;
};

int cmd_simulate(const SimulateOptions& opt) {
  rmp::Scenario sc;
  try {
    sc = rmp::load_scenario(opt.scenario_path);
    if (!opt.strategy.empty()) sc.strategy = rmp::StrategySpec::parse(opt.strategy);
    if (opt.dt > 0.0) sc.integrator.dt = opt.dt;
    if (opt.steps > 0) sc.integrator.max_steps = opt.steps;
    if (opt.seed >= 0) sc.seed = static_cast<std::uint64_t>(opt.seed);
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }

  const rmp::Trajectory traj = rmp::run(sc, sc.strategy);

  const fs::path base = opt.out_dir.empty() ? fs::path(opt.scenario_path).parent_path()
                                            : fs::path(opt.out_dir);
  std::error_code ec;
  fs::create_directories(base, ec);
  const std::string stem = fs::path(opt.scenario_path).stem().string();

  {
    std::ofstream csv(base / (stem + "_trajectory.csv"));
    rmp::write_trajectory_csv(csv, sc, traj);
  }
  {
    std::ofstream summary(base / (stem + "_summary.json"));
    summary << rmp::summary_to_json(sc, sc.strategy, traj).dump(2) << "\n";
  }

  std::cout << sc.name << ": " << rmp::verdict_name(traj.verdict) << " after "
            << traj.states.size() - 1 << " steps (target error "
            << traj.final_target_error << ", min clearance " << traj.min_clearance << ")\n";
  return verdict_exit_code(traj.verdict);
}

struct CompareOptions {
  std::string scenario_dir;
  int generate = 0;
  std::int64_t seed = 7;
  std::string strategies;
  std::string out_dir = ".";
};

int cmd_compare(const CompareOptions& opt) {
  std::vector<rmp::Scenario> scenarios;
  try {
    if (!opt.scenario_dir.empty()) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(opt.scenario_dir)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      for (const fs::path& file : files) scenarios.push_back(rmp::load_scenario(file.string()));
    }
    if (opt.generate > 0) {
      for (const rmp::Scenario& sc :
           rmp::generate_reach_batch(opt.generate, static_cast<std::uint64_t>(opt.seed))) {
        scenarios.push_back(sc);
      }
    }
    if (scenarios.empty()) {
      std::cerr << "configuration error: empty batch (use --generate or --scenarios)\n";
      return kExitConfig;
    }
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::vector<rmp::StrategySpec> strategies;
  if (opt.strategies.empty()) {
    strategies = rmp::default_strategy_set();
  } else {
    std::stringstream ss(opt.strategies);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        strategies.push_back(rmp::StrategySpec::parse(item));
      } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
      }
    }
  }

  const auto started = std::chrono::steady_clock::now();
  const rmp::CompareTable table = rmp::batch_compare(scenarios, strategies);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  fs::create_directories(opt.out_dir);
  {
    std::ofstream rows(fs::path(opt.out_dir) / "compare_rows.csv");
    rmp::write_compare_csv(rows, table);
  }
  {
    std::ofstream summary(fs::path(opt.out_dir) / "compare_summary.csv");
    rmp::write_compare_summary(summary, table);
  }

  std::cout << scenarios.size() << " scenarios x " << strategies.size() << " strategies in "
            << elapsed << " s\n\n";
  std::cout << "strategy                 success  collision  mean path  mean clearance\n";
  for (const rmp::StrategySummary& s : table.summary) {
    std::printf("%-24s %6.2f%%    %6.2f%%   %8.3f        %8.4f\n", s.strategy.c_str(),
                100.0 * s.success_rate, 100.0 * s.collision_rate, s.mean_path_length,
                s.mean_min_clearance);
  }
  return kExitSuccess;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, bool fault) {
  std::vector<rmp::SuiteReport> reports;
  try {
    reports = rmp::verify_suites(suite, seed, fault);
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }
  bool all_passed = true;
  for (const rmp::SuiteReport& report : reports) {
    std::cout << report.suite << ":\n";
    rmp::print_report(std::cout, report);
    all_passed = all_passed && report.passed();
  }
  std::cout << (all_passed ? "all invariants hold\n" : "invariant violations detected\n");
  return all_passed ? kExitSuccess : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian motion policy simulator"};
  app.require_subcommand(1);

  SimulateOptions sim;
  CLI::App* simulate = app.add_subcommand("simulate", "integrate a scenario file");
  simulate->add_option("scenario", sim.scenario_path, "scenario JSON file")->required();
  simulate->add_option("--out", sim.out_dir, "output directory (default: next to the scenario)");
  simulate->add_option("--strategy", sim.strategy,
                       "metricWeighted | scaledIdentity[_wX] | superposition");
  simulate->add_option("--dt", sim.dt, "integrator step override");
  simulate->add_option("--steps", sim.steps, "horizon override");
  simulate->add_option("--seed", sim.seed, "seed override");

  CompareOptions cmp;
  CLI::App* compare = app.add_subcommand("compare", "run a strategy comparison batch");
  compare->add_option("--scenarios", cmp.scenario_dir, "directory of scenario JSON files");
  compare->add_option("--generate", cmp.generate, "number of random reaching scenes to add");
  compare->add_option("--seed", cmp.seed, "seed for the scene generator");
  compare->add_option("--strategies", cmp.strategies, "comma-separated strategy list");
  compare->add_option("--out", cmp.out_dir, "output directory for CSV tables");

  std::string suite = "all";
  std::uint64_t verify_seed = 0;
  bool fault = false;
  CLI::App* verify = app.add_subcommand("verify", "run the randomized property suites");
  verify->add_option("suite", suite, "algebra | kinematics | limits | policies | tree | all");
  verify->add_option("--seed", verify_seed, "base seed (0 = suite defaults)");
  verify->add_flag("--negate-metric-fault", fault,
                   "corrupt one metric to prove the harness detects it")
      ->group("");  // hidden: negative-control hook for the test suite

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) return cmd_simulate(sim);
  if (compare->parsed()) return cmd_compare(cmp);
  if (verify->parsed()) return cmd_verify(suite, verify_seed, fault);
  return kExitConfig;
}
