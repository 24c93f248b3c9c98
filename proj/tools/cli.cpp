#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <set>
#include <sstream>

#include "tvopt/bounds.hpp"
#include "tvopt/io.hpp"

namespace tvopt::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::run: return "run";
    case Mode::compare: return "compare";
    case Mode::sweep: return "sweep";
    case Mode::bench_scaling: return "bench-scaling";
    case Mode::check_bounds: return "check-bounds";
    case Mode::mpc: return "mpc";
  }
  return "run";
}

Mode parse_mode(std::string_view s) {
  for (Mode m : {Mode::run, Mode::compare, Mode::sweep, Mode::bench_scaling, Mode::check_bounds, Mode::mpc})
    if (to_string(m) == s) return m;
  throw ConfigError("unknown mode '" + std::string(s) + "'");
}

json preset(std::string_view name) {
  if (name == "paper-6.1") {
    return json{{"problem", {{"id", "scalar-tracking"}, {"params", json::object()}}},
                {"solver", {{"alpha", 0.1}, {"epsilon", 0.3}, {"delta", 0.1}, {"updates_per_tick", 1},
                            {"t_end", 5.0}, {"x0", {100.0}}}},
                {"algorithms", {"gd", "alg1", "alg3", "euler2", "alg4"}},
                {"tail_fraction", 0.5}};
  }
  if (name == "paper-6.2") {
    return json{{"mpc", {{"Hp", 10}, {"Hu", 10}, {"lambda", 10.0}, {"delta", 0.1}, {"sim_steps", 400},
                         {"x_h0", 0.0}, {"y_h0", 0.0}, {"u_init", 10.0}}},
                {"solver", {{"alpha", 0.5}, {"epsilon", 0.03}, {"delta", 0.1}, {"updates_per_tick", 1}}},
                {"algorithms", {"gd", "alg2", "alg4-approx"}},
                {"threshold", 0.03},
                {"tail_fraction", 0.5}};
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

namespace {

const std::set<std::string> kTopLevelKeys = {"problem",   "solver",          "algorithms", "seed",
                                             "tail_fraction", "threshold",   "constants_margin",
                                             "sweep",     "bench",           "mpc"};

template <class T>
T field(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

SolverConfig base_solver(const json& s, std::size_t dimension) {
  if (!s.is_object()) throw ConfigError("'solver' must be an object");
  SolverConfig c;
  c.alpha = field(s, "alpha", c.alpha);
  c.epsilon = field(s, "epsilon", c.epsilon);
  c.delta = field(s, "delta", c.delta);
  c.updates_per_tick = field(s, "updates_per_tick", c.updates_per_tick);
  c.t_end = field(s, "t_end", c.t_end);
  Vector x0 = field(s, "x0", Vector{});
  if (x0.empty()) x0.assign(dimension, 0.0);
  if (x0.size() == 1 && dimension > 1) x0.assign(dimension, x0[0]);
  c.x0 = std::move(x0);
  return c;
}

void ensure_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir.string());
  const fs::path probe = dir / ".tvopt-write-probe";
  {
    std::ofstream f(probe);
    if (!f) throw ConfigError("output directory " + dir.string() + " is not writable");
  }
  fs::remove(probe, ec);
}

}  // namespace

ExperimentSpec resolve_spec(Mode mode, const json& config, const std::optional<std::string>& preset_name,
                            const fs::path& out_dir) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  json merged = preset_name ? preset(*preset_name) : json::object();
  merged.merge_patch(config);
  for (const auto& [key, _] : merged.items())
    if (!kTopLevelKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");

  ExperimentSpec spec;
  spec.mode = mode;
  spec.out_dir = out_dir;
  spec.seed = field(merged, "seed", std::uint64_t{1});
  spec.tail_fraction = field(merged, "tail_fraction", spec.tail_fraction);
  if (!(spec.tail_fraction > 0.0 && spec.tail_fraction <= 1.0)) throw ConfigError("tail_fraction must lie in (0, 1]");
  if (merged.contains("threshold")) spec.threshold = field(merged, "threshold", 0.0);
  spec.constants_margin = field(merged, "constants_margin", spec.constants_margin);
  if (!(spec.constants_margin >= 0.0)) throw ConfigError("constants_margin must be non-negative");

  std::size_t dimension = 1;
  if (mode == Mode::mpc) {
    spec.mpc = field(merged, "mpc", MpcConfig{});
    spec.mpc.validate();
    dimension = static_cast<std::size_t>(spec.mpc.Hu);
  } else if (mode != Mode::bench_scaling) {
    const json p = field(merged, "problem", json::object());
    spec.problem.id = field(p, "id", spec.problem.id);
    spec.problem.params = field(p, "params", ParamMap{});
    if (!spec.problem.params.count("seed")) spec.problem.params["seed"] = static_cast<double>(spec.seed);
    dimension = make_problem(spec.problem).cost->dimension();
  }

  if (mode == Mode::bench_scaling) {
    const json b = field(merged, "bench", json::object());
    spec.bench.n = field(b, "n", spec.bench.n);
    spec.bench.euler2_n = field(b, "euler2_n", spec.bench.euler2_n);
    spec.bench.euler2_max_n = field(b, "euler2_max_n", spec.bench.euler2_max_n);
    spec.bench.min_seconds = field(b, "min_seconds", spec.bench.min_seconds);
    spec.bench.repeats = field(b, "repeats", spec.bench.repeats);
    if (spec.bench.n.empty()) throw ConfigError("bench.n must not be empty");
    if (spec.bench.repeats < 1) throw ConfigError("bench.repeats must be at least 1");
    for (std::size_t n : spec.bench.n)
      if (n == 0) throw ConfigError("bench.n entries must be positive");
  } else {
    const SolverConfig base = base_solver(field(merged, "solver", json::object()), dimension);
    const auto algorithms = field(merged, "algorithms", std::vector<std::string>{});
    if (algorithms.empty()) throw ConfigError("algorithm list is empty");
    for (const std::string& name : algorithms) {
      SolverConfig c = base;
      c.algorithm = parse_algorithm(name);
      if (mode == Mode::mpc) {
        c.delta = spec.mpc.delta;
        c.x0.assign(dimension, spec.mpc.u_init);
        c.t_end = static_cast<double>(spec.mpc.sim_steps - 1) * spec.mpc.delta;
      }
      c.validate();
      spec.solvers.push_back(std::move(c));
    }
  }

  if (mode == Mode::sweep) {
    const json s = field(merged, "sweep", json());
    if (!s.is_object()) throw ConfigError("sweep mode needs a 'sweep' object");
    SweepSpec sw;
    sw.parameter = field(s, "parameter", std::string{});
    sw.values = field(s, "values", std::vector<double>{});
    static const std::set<std::string> allowed = {"alpha", "epsilon", "delta", "updates_per_tick"};
    if (!allowed.count(sw.parameter)) throw ConfigError("sweep.parameter must be alpha, epsilon, delta or updates_per_tick");
    if (sw.values.empty()) throw ConfigError("sweep.values must not be empty");
    spec.sweep = std::move(sw);
  }

  spec.resolved = merged;
  spec.resolved["mode"] = std::string(to_string(mode));
  if (preset_name) spec.resolved["preset"] = *preset_name;
  return spec;
}

namespace {

void write_trajectory_files(const fs::path& dir, const std::string& stem, const Trajectory& traj) {
  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  write_text_file(dir / (stem + ".csv"), csv.str());
  write_text_file(dir / (stem + ".json"), json(traj).dump(1));
}

void write_json(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

struct RunOutcome {
  std::string label;
  Algorithm algorithm = Algorithm::gd;
  std::optional<Trajectory> traj;
  std::string status = "ok";
  std::string message;
};

RunOutcome run_one(const Problem& problem, const SolverConfig& cfg, std::string label) {
  RunOutcome out;
  out.label = std::move(label);
  out.algorithm = cfg.algorithm;
  try {
    out.traj = run(*problem.cost, problem.optimum.get(), cfg);
  } catch (const NumericAbort& e) {
    out.status = "numeric-abort";
    out.message = e.what();
    out.traj = e.partial();
  } catch (const CapabilityError& e) {
    out.status = "capability-error";
    out.message = e.what();
  } catch (const ConfigError& e) {
    out.status = "config-error";
    out.message = e.what();
  }
  return out;
}

std::vector<RunOutcome> run_all(const Problem& problem, const std::vector<std::pair<std::string, SolverConfig>>& jobs) {
  std::vector<std::future<RunOutcome>> futures;
  futures.reserve(jobs.size());
  for (const auto& [label, cfg] : jobs)
    futures.push_back(std::async(std::launch::async, run_one, std::cref(problem), std::cref(cfg), label));
  std::vector<RunOutcome> out;
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

json outcome_json(const RunOutcome& o, const ExperimentSpec& spec) {
  json j{{"label", o.label}, {"algorithm", std::string(to_string(o.algorithm))}, {"status", o.status}};
  if (!o.message.empty()) j["message"] = o.message;
  if (o.traj) {
    j["warnings"] = o.traj->warnings;
    j["ticks"] = o.traj->records.empty() ? 0 : o.traj->records.size() - 1;
    if (o.status == "ok") {
      try {
        j["tail"] = tracking_error_summary(*o.traj, spec.tail_fraction, spec.threshold);
      } catch (const std::exception& e) {
        j["tail_error"] = e.what();
      }
    }
  }
  return j;
}

int finish(const std::vector<RunOutcome>& outcomes) {
  int code = ok;
  for (const RunOutcome& o : outcomes) {
    if (o.status == "numeric-abort") code = std::max(code, static_cast<int>(numeric_abort));
    if (o.status == "capability-error" || o.status == "config-error")
      code = code == ok ? static_cast<int>(config_error) : code;
  }
  return code;
}

std::string format_value(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

RegularityConstants trajectory_constants(const CostOracle& cost, const Trajectory& traj, double margin) {
  std::vector<EvalPoint> points;
  for (std::size_t i = 0; i < traj.records.size(); ++i) {
    const StepRecord& r = traj.records[i];
    points.push_back({r.x, r.t});
    if (i > 0) {
      points.push_back({r.x_pred, r.t});
      points.push_back({traj.records[i - 1].x, r.t});
    }
  }
  EstimateOptions opt;
  opt.margin = margin;
  return estimate_constants(cost, points, opt);
}

int cmd_run(const ExperimentSpec& spec) {
  ensure_out_dir(spec.out_dir);
  const Problem problem = make_problem(spec.problem);
  const SolverConfig& cfg = spec.solvers.front();
  const RunOutcome o = run_one(problem, cfg, std::string(to_string(cfg.algorithm)));
  if (o.traj) write_trajectory_files(spec.out_dir, "trajectory_" + o.label, *o.traj);
  write_json(spec.out_dir / "summary.json", json{{"config", spec.resolved}, {"results", {outcome_json(o, spec)}}});
  if (!o.message.empty()) std::cerr << o.label << ": " << o.message << '\n';
  return finish({o});
}

int cmd_compare(const ExperimentSpec& spec) {
  ensure_out_dir(spec.out_dir);
  const Problem problem = make_problem(spec.problem);
  std::vector<std::pair<std::string, SolverConfig>> jobs;
  for (const SolverConfig& c : spec.solvers) jobs.emplace_back(std::string(to_string(c.algorithm)), c);
  const std::vector<RunOutcome> outcomes = run_all(problem, jobs);

  json results = json::array();
  for (const RunOutcome& o : outcomes) {
    if (o.traj) write_trajectory_files(spec.out_dir, "trajectory_" + o.label, *o.traj);
    results.push_back(outcome_json(o, spec));
    if (!o.message.empty()) std::cerr << o.label << ": " << o.message << '\n';
    if (o.status == "ok" && results.back().contains("tail"))
      std::cout << o.label << "  mean tail err_f " << results.back()["tail"]["mean_tail"] << '\n';
  }
  write_json(spec.out_dir / "summary.json", json{{"config", spec.resolved}, {"results", results}});
  // Capability mismatches are reported per algorithm; only aborts change the status.
  int code = ok;
  for (const RunOutcome& o : outcomes)
    if (o.status == "numeric-abort") code = numeric_abort;
  return code;
}

int cmd_sweep(const ExperimentSpec& spec) {
  ensure_out_dir(spec.out_dir);
  const Problem problem = make_problem(spec.problem);
  const SweepSpec& sw = *spec.sweep;
  std::vector<std::pair<std::string, SolverConfig>> jobs;
  for (const SolverConfig& base : spec.solvers) {
    for (double v : sw.values) {
      SolverConfig c = base;
      if (sw.parameter == "alpha") c.alpha = v;
      if (sw.parameter == "epsilon") c.epsilon = v;
      if (sw.parameter == "delta") c.delta = v;
      if (sw.parameter == "updates_per_tick") c.updates_per_tick = static_cast<int>(v);
      try {
        c.validate();
      } catch (const ConfigError& e) {
        throw ConfigError("sweep value " + format_value(v) + ": " + e.what());
      }
      jobs.emplace_back(std::string(to_string(c.algorithm)) + "_" + sw.parameter + "_" + format_value(v), c);
    }
  }
  const std::vector<RunOutcome> outcomes = run_all(problem, jobs);
  json results = json::array();
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const RunOutcome& o = outcomes[i];
    if (o.traj) write_trajectory_files(spec.out_dir, "trajectory_" + o.label, *o.traj);
    json j = outcome_json(o, spec);
    j["parameter"] = sw.parameter;
    j["value"] = sw.values[i % sw.values.size()];
    results.push_back(std::move(j));
  }
  write_json(spec.out_dir / "summary.json", json{{"config", spec.resolved}, {"results", results}});
  return finish(outcomes);
}

std::optional<double> loglog_slope(const std::vector<ScalingPoint>& points) {
  if (points.size() < 2) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const ScalingPoint& p : points) {
    const double x = std::log(static_cast<double>(p.n));
    const double y = std::log(p.seconds_per_tick);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(points.size());
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / den;
}

namespace {

double time_per_tick(Algorithm alg, std::size_t n, const BenchSpec& spec) {
  const SeparableQuadraticTracker cost(n, 1.0, 1.0);
  SolverConfig cfg;
  cfg.algorithm = alg;
  cfg.alpha = 0.1;
  cfg.epsilon = 1e-3;
  cfg.delta = 0.1;
  cfg.t_end = 1.0;
  cfg.x0.assign(n, 3.0);
  const Tracker tracker(cost, cfg);

  using clock = std::chrono::steady_clock;
  std::vector<double> samples;
  volatile double sink = 0.0;
  for (int r = 0; r < spec.repeats; ++r) {
    Vector x = cfg.x0;
    std::size_t ticks = 0;
    const auto start = clock::now();
    double elapsed = 0.0;
    do {
      const double t = static_cast<double>(ticks) * cfg.delta;
      PredictionOutcome pred = tracker.predict(x, t, std::nullopt);
      x = tracker.update(pred.x_pred, t + cfg.delta);
      ++ticks;
      elapsed = std::chrono::duration<double>(clock::now() - start).count();
    } while (elapsed < spec.min_seconds);
    sink = sink + x[0];
    samples.push_back(elapsed / static_cast<double>(ticks));
  }
  std::sort(samples.begin(), samples.end());
  return samples[samples.size() / 2];
}

}  // namespace

std::vector<ScalingSeries> bench_scaling(const BenchSpec& spec) {
  std::vector<std::size_t> euler_n = spec.euler2_n;
  if (euler_n.empty())
    for (std::size_t n : spec.n)
      if (n <= spec.euler2_max_n) euler_n.push_back(n);

  std::vector<ScalingSeries> out;
  for (auto [alg, sizes] : {std::pair{Algorithm::alg1, spec.n}, std::pair{Algorithm::euler2, euler_n}}) {
    ScalingSeries s;
    s.algorithm = alg;
    for (std::size_t n : sizes) s.points.push_back({n, time_per_tick(alg, n, spec)});
    s.slope = loglog_slope(s.points);
    out.push_back(std::move(s));
  }
  return out;
}

int cmd_bench_scaling(const ExperimentSpec& spec) {
  ensure_out_dir(spec.out_dir);
  const std::vector<ScalingSeries> series = bench_scaling(spec.bench);
  json results = json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << "algorithm,n,seconds_per_tick\n";
  for (const ScalingSeries& s : series) {
    json pts = json::array();
    for (const ScalingPoint& p : s.points) {
      pts.push_back({{"n", p.n}, {"seconds_per_tick", p.seconds_per_tick}});
      csv << to_string(s.algorithm) << ',' << p.n << ',' << p.seconds_per_tick << '\n';
    }
    json j{{"algorithm", std::string(to_string(s.algorithm))}, {"points", pts}};
    if (s.slope) {
      j["slope"] = *s.slope;
    } else {
      j["slope"] = nullptr;
      j["slope_undefined"] = true;
    }
    std::cout << to_string(s.algorithm) << "  slope "
              << (s.slope ? format_value(*s.slope) : std::string("undefined")) << '\n';
    results.push_back(std::move(j));
  }
  write_text_file(spec.out_dir / "bench_scaling.csv", csv.str());
  write_json(spec.out_dir / "bench_scaling.json", json{{"config", spec.resolved}, {"results", results}});
  return ok;
}

int cmd_check_bounds(const ExperimentSpec& spec) {
  ensure_out_dir(spec.out_dir);
  const Problem problem = make_problem(spec.problem);
  std::vector<std::pair<std::string, SolverConfig>> jobs;
  for (const SolverConfig& c : spec.solvers) jobs.emplace_back(std::string(to_string(c.algorithm)), c);
  const std::vector<RunOutcome> outcomes = run_all(problem, jobs);

  int code = ok;
  json results = json::array();
  for (const RunOutcome& o : outcomes) {
    json j = outcome_json(o, spec);
    if (o.status == "capability-error" || o.status == "config-error") {
      code = std::max(code, static_cast<int>(config_error));
    } else if (o.status == "numeric-abort") {
      code = std::max(code, static_cast<int>(numeric_abort));
    } else {
      const Trajectory& traj = *o.traj;
      write_trajectory_files(spec.out_dir, "trajectory_" + o.label, traj);
      const RegularityConstants c = trajectory_constants(*problem.cost, traj, spec.constants_margin);
      const BoundReport report = bound_report(c, o.traj->config.alpha, o.traj->config.delta, o.traj->config.epsilon);
      j["report"] = report;
      if (const auto kind = bound_for(o.algorithm)) {
        const BoundCheck check = check_bound(traj, report, *kind);
        j["bound"] = std::string(to_string(*kind));
        j["check"] = check;
        std::cout << o.label << "  " << to_string(*kind) << "  " << (check.holds ? "holds" : "VIOLATED")
                  << "  worst margin " << check.worst_margin << " at k=" << check.worst_k << '\n';
        if (!check.holds) code = std::max(code, static_cast<int>(bound_violation));
      } else {
        j["bound"] = nullptr;
      }
    }
    if (!o.message.empty()) std::cerr << o.label << ": " << o.message << '\n';
    results.push_back(std::move(j));
  }
  write_json(spec.out_dir / "bounds.json", json{{"config", spec.resolved}, {"results", results}});
  return code;
}

int cmd_mpc(const ExperimentSpec& spec) {
  ensure_out_dir(spec.out_dir);
  const ReferencePath path = make_sine_path(spec.mpc.sim_steps, spec.mpc.Hp);
  const double threshold = spec.threshold.value_or(0.03);
  int code = ok;
  json results = json::array();
  for (const SolverConfig& c : spec.solvers) {
    const std::string label(to_string(c.algorithm));
    json j{{"algorithm", label}};
    try {
      const ClosedLoopResult r = run_closed_loop(spec.mpc, path, c);
      write_trajectory_files(spec.out_dir, "traj_u1_" + label, r.traj_u1);
      write_trajectory_files(spec.out_dir, "traj_u2_" + label, r.traj_u2);
      std::ostringstream csv;
      write_robot_path_csv(csv, r.robot_path);
      write_text_file(spec.out_dir / ("robot_path_" + label + ".csv"), csv.str());
      j["status"] = "ok";
      for (const auto& [name, traj] : {std::pair{"u1", &r.traj_u1}, std::pair{"u2", &r.traj_u2}}) {
        const ErrorSummary s = tracking_error_summary(*traj, spec.tail_fraction, threshold, ErrorMetric::err_x);
        json a = s;
        a["first_t_below"] = s.first_k_below ? json(static_cast<double>(*s.first_k_below) * spec.mpc.delta) : json();
        j[name] = a;
        std::cout << label << "  " << name << "  u-error below " << threshold << " at k="
                  << (s.first_k_below ? std::to_string(*s.first_k_below) : std::string("never"))
                  << "  mean tail " << s.mean_tail << '\n';
      }
    } catch (const NumericAbort& e) {
      j["status"] = "numeric-abort";
      j["message"] = e.what();
      write_trajectory_files(spec.out_dir, "partial_" + label, e.partial());
      code = std::max(code, static_cast<int>(numeric_abort));
    }
    results.push_back(std::move(j));
  }
  write_json(spec.out_dir / "summary.json", json{{"config", spec.resolved}, {"results", results}});
  return code;
}

int dispatch(const ExperimentSpec& spec) {
  switch (spec.mode) {
    case Mode::run: return cmd_run(spec);
    case Mode::compare: return cmd_compare(spec);
    case Mode::sweep: return cmd_sweep(spec);
    case Mode::bench_scaling: return cmd_bench_scaling(spec);
    case Mode::check_bounds: return cmd_check_bounds(spec);
    case Mode::mpc: return cmd_mpc(spec);
  }
  return config_error;
}

}  // namespace tvopt::cli
