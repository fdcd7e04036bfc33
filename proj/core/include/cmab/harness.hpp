#pragma once

// Experiment orchestration: seeded repetitions of (instance, learner,
// attack), metric aggregation, CSV output, replay audits and the
// unknown-environment hardness demonstration.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmab/attacks.hpp"
#include "cmab/environment.hpp"
#include "cmab/learners.hpp"
#include "cmab/oracles.hpp"

namespace cmab {

// ---- configuration ---------------------------------------------------------

/// Flat `section.key = value` text; `#` starts a comment. Duplicate keys and
/// malformed lines raise ParseError with the line number.
std::map<std::string, std::string> parse_config_text(const std::string& text);

enum class AttackKind { None, Algorithm1, ImExtended };
std::string_view to_string(AttackKind a);
AttackKind parse_attack_kind(std::string_view s);

/// How the attacked target is picked from the target set.
enum class TargetChoice {
  FirstPositive,  ///< smallest-id member with a positive gap
  RandomMember,   ///< seeded uniform member, gap ignored
  Listed,         ///< the first listed member, gap ignored
};
std::string_view to_string(TargetChoice c);
TargetChoice parse_target_choice(std::string_view s);

enum class RegretReference {
  Oracle,   ///< the family oracle's own solution on the true means
  Optimum,  ///< brute force over the enumerated action space
};
std::string_view to_string(RegretReference r);
RegretReference parse_regret_reference(std::string_view s);

/// Everything needed to run one repetition once the scenario is built.
struct RunSpec {
  LearnerKind learner = LearnerKind::Cucb;
  RadiusMode radius = RadiusMode::HighProbability;
  double delta = kDefaultDelta;
  OracleOptions oracle;
  GapSolver gap_solver = GapSolver::BruteForce;
  AttackKind attack = AttackKind::None;
  TargetChoice target_choice = TargetChoice::FirstPositive;
  int ell = 1;                            ///< im-extended hop radius
  std::optional<std::int64_t> budget;     ///< cap on changed entries
  std::optional<double> budget_exponent;  ///< budget = floor(T^x) when set
  std::int64_t horizon = 1;
  std::int64_t stride = 1;                ///< emit every stride-th round (and round T)
  bool keep_log = false;
  RegretReference regret = RegretReference::Oracle;
};

struct ExperimentConfig {
  // instance
  std::string builder;                       ///< empty when loading from a file
  std::map<std::string, std::string> params; ///< instance.* keys other than source/builder/file
  std::filesystem::path instance_file;
  std::filesystem::path targets_file;
  // target (builders)
  std::string target_kind;
  std::map<std::string, std::string> target_params;

  RunSpec run;
  int repetitions = 1;
  std::uint64_t base_seed = 0;
  int threads = 1;  ///< 0 = hardware concurrency
  std::filesystem::path output_dir;

  static ExperimentConfig from_map(const std::map<std::string, std::string>& kv);
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& path);

  /// ConfigurationError on inconsistent settings (checked before any run).
  void validate() const;
};

struct Scenario {
  Instance instance;
  TargetSet targets;
};

/// Builds the instance and target set named by the config. Builders:
/// hard, mab, random-linear, spanning-tree, shortest-path, coverage,
/// cascade, influence, mdp.
Scenario build_scenario(const ExperimentConfig& config);

/// Rejects learner/instance/attack combinations that cannot run.
void check_compatible(const Instance& instance, const TargetSet& targets, const RunSpec& spec);

// ---- runs ------------------------------------------------------------------

/// Resolved once per experiment and shared read-only by every repetition.
struct AttackPlan {
  SuperArm target;                      ///< arm whose pulls are counted
  bool permutation_closed = false;
  std::optional<AttackPolicy> policy;   ///< absent when attack = none
  std::optional<GapReport> gaps;
  std::optional<std::int64_t> budget;
  double reference_reward = 0.0;        ///< per-round reward the regret is measured against
};

AttackPlan plan_attack(const Instance& instance, const TargetSet& targets, const RunSpec& spec,
                       std::uint64_t seed);

/// Per-round metrics of one repetition at the emitted rounds.
struct MetricSeries {
  std::vector<std::int64_t> rounds;
  std::vector<double> cost;             ///< cumulative changed entries
  std::vector<double> target_pulls;     ///< cumulative pulls of the planned target
  std::vector<double> regret;           ///< cumulative expected regret
  std::vector<double> target_fraction;  ///< share of target members in the pulled arm
};

struct RepetitionResult {
  std::uint64_t seed = 0;
  MetricSeries series;
  std::vector<RoundRecord> log;  ///< filled when RunSpec::keep_log
};

RepetitionResult run_repetition(const Instance& instance, const AttackPlan& plan, const RunSpec& spec,
                                std::uint64_t seed);

struct AggregateSeries {
  std::vector<std::int64_t> rounds;
  std::vector<double> cost_mean, cost_var;
  std::vector<double> target_pulls_mean, target_pulls_var;
  std::vector<double> regret_mean, regret_var;
  std::vector<double> target_fraction_mean, target_fraction_var;
};

/// Mean and sample variance (n - 1 denominator; 0 for a single repetition).
AggregateSeries aggregate(const std::vector<RepetitionResult>& reps);

struct ExperimentResult {
  AttackPlan plan;
  std::vector<RepetitionResult> repetitions;
  AggregateSeries aggregate;
};

/// Repetition r uses seed repetition_seed(base_seed, r). `threads` > 1 runs
/// repetitions concurrently with results identical to a sequential run.
ExperimentResult run_experiment(const Instance& instance, const TargetSet& targets, const RunSpec& spec,
                                int repetitions, std::uint64_t base_seed, int threads = 1);

/// Builds, validates, runs and (when output_dir is set) writes
/// aggregate.csv, rep_<r>.csv, rounds_<r>.csv (with keep_log) and gaps.csv.
ExperimentResult run_experiment(const ExperimentConfig& config);

// ---- CSV -------------------------------------------------------------------

/// Shortest round-tripping decimal form.
std::string format_number(double x);

inline constexpr std::string_view kAggregateHeader =
    "round,cost_mean,cost_var,target_pulls_mean,target_pulls_var,regret_mean,regret_var,"
    "target_fraction_mean,target_fraction_var";

void write_aggregate_csv(std::ostream& out, const AggregateSeries& series);
void write_series_csv(std::ostream& out, const MetricSeries& series);

/// Columns: round,pulled_id,pulled,members,triggered,visits,raw,corrupted,cost.
/// List cells are space separated.
void write_round_log(std::ostream& out, const std::vector<RoundRecord>& log);
std::vector<RoundRecord> read_round_log(std::istream& in);

struct ReplayAudit {
  std::int64_t cost = 0;
  std::int64_t target_pulls = 0;
  bool matches = false;
  std::string mismatch;  ///< first disagreement, empty when matching
};

/// Recounts cost and target pulls from the log and compares them with the
/// emitted series at every emitted round.
ReplayAudit audit_replay(const Instance& instance, const AttackPlan& plan, const std::vector<RoundRecord>& log,
                         const MetricSeries& series);

// ---- hardness demonstration ------------------------------------------------

struct HardnessDemoOptions {
  int n = 6;
  double epsilon = 0.1;
  int special = 0;  ///< 0 = n, the last arm the sequential attacker reaches
  std::int64_t horizon = 10'000'000;
  std::int64_t known_horizon = 0;  ///< known-mean contrast run length; 0 skips it
  RadiusMode radius = RadiusMode::HighProbability;
  double delta = kDefaultDelta;
  std::uint64_t seed = 0;
};

struct HardnessReport {
  int n = 0;
  double epsilon = 0.0;
  int special = 0;
  std::int64_t rounds = 0;
  std::vector<std::int64_t> visit_rounds;  ///< round of the first pull of S_1, S_2, ...
  /// pulls of S_{n+1} before the first visit (entry 0) and between
  /// consecutive visits (entry l)
  std::vector<std::int64_t> bridge_pulls;
  std::vector<double> growth;  ///< bridge_pulls[l] / bridge_pulls[l - 1], l >= 1
  double growth_bound = 0.0;   ///< 1 / (2 eps)
  std::int64_t unknown_cost = 0;
  bool reached_special = false;
  std::int64_t known_rounds = 0;
  std::int64_t known_cost = 0;
  std::int64_t known_target_pulls = 0;
};

/// Sequential unknown-environment attacker against CUCB on the hard
/// instance, plus the known-mean Algorithm-1 contrast run. Requires
/// 2 <= n <= 8 and 0 < eps < 1/8.
HardnessReport hardness_demo(const HardnessDemoOptions& options);

void write_hardness_report(std::ostream& out, const HardnessReport& report);

// ---- classification --------------------------------------------------------

/// Process exit code for a classification: 0 attackable, 2 unattackable, 3 boundary.
int exit_code(Classification c);

}  // namespace cmab
