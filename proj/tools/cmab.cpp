#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cmab/attacks.hpp"
#include "cmab/errors.hpp"
#include "cmab/harness.hpp"
#include "cmab/instance_io.hpp"

namespace {

int run_command(const std::string& config_path, const std::optional<std::uint64_t>& seed,
                const std::optional<std::string>& out) {
  cmab::ExperimentConfig config = cmab::ExperimentConfig::load(config_path);
  if (seed) config.base_seed = *seed;
  if (out) config.output_dir = *out;
  const cmab::ExperimentResult res = cmab::run_experiment(config);
  const auto& a = res.aggregate;
  std::cout << "target " << res.plan.target.label << ", " << res.repetitions.size() << " repetitions, "
            << a.rounds.back() << " rounds\n"
            << "final cost mean " << cmab::format_number(a.cost_mean.back()) << ", target pulls mean "
            << cmab::format_number(a.target_pulls_mean.back()) << ", regret mean "
            << cmab::format_number(a.regret_mean.back()) << '\n';
  if (config.output_dir.empty()) cmab::write_aggregate_csv(std::cout, a);
  return 0;
}

int classify_command(const std::string& instance_path, const std::string& targets_path, const std::string& solver,
                     const std::optional<std::string>& out) {
  const cmab::Instance inst = cmab::load_instance(instance_path);
  const cmab::TargetSet targets = cmab::load_targets(inst, targets_path);
  const cmab::GapReport report = cmab::compute_gap(inst, targets, cmab::parse_gap_solver(solver));
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  if (out) {
    std::ofstream f(*out);
    if (!f) throw cmab::ConfigurationError("cannot write " + *out);
    cmab::write_gap_csv(f, report);
  } else {
    cmab::write_gap_csv(std::cout, report);
  }
  std::cerr << "delta_m = " << cmab::format_number(report.delta_m) << " (" << cmab::to_string(report.classification)
            << ")\n";
  return cmab::exit_code(report.classification);
}

int hardness_command(const cmab::HardnessDemoOptions& options, const std::optional<std::string>& out) {
  const cmab::HardnessReport report = cmab::hardness_demo(options);
  if (out) {
    std::ofstream f(*out);
    if (!f) throw cmab::ConfigurationError("cannot write " + *out);
    cmab::write_hardness_report(f, report);
  }
  cmab::write_hardness_report(std::cout, report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reward-poisoning attacks on combinatorial bandits"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment described by a config file");
  run->add_option("--config", config_path, "section.key = value file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override run.seed");
  run->add_option("--out", out, "Override output.dir");

  std::string instance_path, targets_path, solver = "brute-force";
  auto* classify = app.add_subcommand("classify", "Attackability gap of a target set");
  classify->add_option("--instance", instance_path, "Instance file")->required()->check(CLI::ExistingFile);
  classify->add_option("--targets", targets_path, "Target-set file")->required()->check(CLI::ExistingFile);
  classify->add_option("--solver", solver, "brute-force | family-exact | greedy");
  classify->add_option("--out", out, "Gap CSV path (default stdout)");

  cmab::HardnessDemoOptions demo;
  std::string radius = "high-prob";
  auto* hardness = app.add_subcommand("hardness-demo", "Unknown-environment attacker on the hard instance");
  hardness->add_option("--n", demo.n, "Number of candidate targets (2..8)");
  hardness->add_option("--epsilon", demo.epsilon, "Gap parameter in (0, 1/8)");
  hardness->add_option("--horizon", demo.horizon, "Rounds for the sequential attacker");
  hardness->add_option("--special", demo.special, "Index of the attackable target (default n)");
  hardness->add_option("--known-horizon", demo.known_horizon, "Rounds for the known-mean contrast run");
  hardness->add_option("--radius", radius, "high-prob | hoeffding");
  hardness->add_option("--seed", seed, "Random seed");
  hardness->add_option("--out", out, "Report path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(config_path, seed, out);
    if (*classify) return classify_command(instance_path, targets_path, solver, out);
    if (*hardness) {
      demo.radius = cmab::parse_radius_mode(radius);
      if (seed) demo.seed = *seed;
      return hardness_command(demo, out);
    }
  } catch (const cmab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
