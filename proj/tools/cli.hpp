#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tvopt/engine.hpp"
#include "tvopt/mpc.hpp"
#include "tvopt/problems.hpp"

namespace tvopt::cli {

enum class Mode { run, compare, sweep, bench_scaling, check_bounds, mpc };

std::string_view to_string(Mode m);
/// Throws ConfigError for an unknown mode.
Mode parse_mode(std::string_view s);

enum ExitCode : int { ok = 0, config_error = 2, bound_violation = 3, numeric_abort = 4 };

struct SweepSpec {
  std::string parameter;  // alpha, epsilon, delta or updates_per_tick
  std::vector<double> values;
};

struct BenchSpec {
  std::vector<std::size_t> n{100, 1000, 10000};
  /// Sizes for euler2; empty means the entries of n up to euler2_max_n.
  std::vector<std::size_t> euler2_n;
  std::size_t euler2_max_n = 2000;
  /// Each repeat runs ticks until at least this much wall time has passed.
  double min_seconds = 0.05;
  int repeats = 5;
};

struct ExperimentSpec {
  Mode mode = Mode::run;
  ProblemSpec problem;
  std::vector<SolverConfig> solvers;
  std::filesystem::path out_dir;
  std::uint64_t seed = 1;
  double tail_fraction = 0.5;
  std::optional<double> threshold;
  double constants_margin = 0.0;
  std::optional<SweepSpec> sweep;
  BenchSpec bench;
  MpcConfig mpc;
  /// Fully merged configuration, echoed into every summary.
  nlohmann::json resolved;
};

/// Named preset configuration, or ConfigError if the name is unknown.
nlohmann::json preset(std::string_view name);

/// Applies `config` as a JSON merge patch over the preset (if any) and
/// validates the result. Throws ConfigError on any schema problem.
ExperimentSpec resolve_spec(Mode mode, const nlohmann::json& config, const std::optional<std::string>& preset_name,
                            const std::filesystem::path& out_dir);

/// Constants over the states a trajectory visited: every (x_k, t_k) plus
/// (x_pred, t_k) and (x_{k-1}, t_k) for k >= 1.
RegularityConstants trajectory_constants(const CostOracle& cost, const Trajectory& traj, double margin = 0.0);

struct ScalingPoint {
  std::size_t n = 0;
  double seconds_per_tick = 0.0;
};

struct ScalingSeries {
  Algorithm algorithm = Algorithm::alg1;
  std::vector<ScalingPoint> points;
  /// Least-squares slope of log(time) against log(n); empty with fewer than two sizes.
  std::optional<double> slope;
};

/// Median per-tick wall time of alg1 and euler2 on the separable quadratic tracker.
std::vector<ScalingSeries> bench_scaling(const BenchSpec& spec);
std::optional<double> loglog_slope(const std::vector<ScalingPoint>& points);

// Each command writes its artifacts under spec.out_dir and returns an exit code.
int cmd_run(const ExperimentSpec& spec);
int cmd_compare(const ExperimentSpec& spec);
int cmd_sweep(const ExperimentSpec& spec);
int cmd_bench_scaling(const ExperimentSpec& spec);
int cmd_check_bounds(const ExperimentSpec& spec);
int cmd_mpc(const ExperimentSpec& spec);

int dispatch(const ExperimentSpec& spec);

}  // namespace tvopt::cli
