#include "tvopt/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace tvopt {

using nlohmann::json;

namespace {

json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double get_real(const json& j, const char* key) {
  const json& v = j.at(key);
  return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
}

json optional_real(const std::optional<double>& v) { return v ? real(*v) : json(nullptr); }

std::optional<double> get_optional(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

}  // namespace

void to_json(json& j, const SolverConfig& c) {
  j = json{{"algorithm", std::string(to_string(c.algorithm))},
           {"alpha", c.alpha},
           {"epsilon", c.epsilon},
           {"delta", c.delta},
           {"updates_per_tick", c.updates_per_tick},
           {"t_end", c.t_end},
           {"x0", c.x0}};
}

void from_json(const json& j, SolverConfig& c) {
  c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  c.alpha = j.at("alpha").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  c.delta = j.at("delta").get<double>();
  c.updates_per_tick = j.value("updates_per_tick", 1);
  c.t_end = j.at("t_end").get<double>();
  c.x0 = j.at("x0").get<Vector>();
}

void to_json(json& j, const StepRecord& r) {
  j = json{{"k", r.k},
           {"t", r.t},
           {"x", r.x},
           {"x_pred", r.x_pred},
           {"branch", std::string(to_string(r.branch))},
           {"f", real(r.f)},
           {"f_star", optional_real(r.f_star)},
           {"err_f", optional_real(r.err_f)},
           {"err_x", optional_real(r.err_x)},
           {"grad_norm", real(r.grad_norm)}};
}

void from_json(const json& j, StepRecord& r) {
  r.k = j.at("k").get<std::size_t>();
  r.t = j.at("t").get<double>();
  r.x = j.at("x").get<Vector>();
  r.x_pred = j.value("x_pred", Vector{});
  r.branch = parse_branch(j.at("branch").get<std::string>());
  r.f = get_real(j, "f");
  r.f_star = get_optional(j, "f_star");
  r.err_f = get_optional(j, "err_f");
  r.err_x = get_optional(j, "err_x");
  r.grad_norm = get_real(j, "grad_norm");
}

void to_json(json& j, const Trajectory& t) {
  j = json{{"problem", t.problem}, {"config", t.config}, {"warnings", t.warnings}, {"records", t.records}};
}

void from_json(const json& j, Trajectory& t) {
  t.problem = j.at("problem").get<std::string>();
  t.config = j.at("config").get<SolverConfig>();
  t.warnings = j.value("warnings", std::vector<std::string>{});
  t.records = j.at("records").get<std::vector<StepRecord>>();
}

void to_json(json& j, const RegularityConstants& c) {
  j = json{{"m", c.m},   {"M", c.M},   {"K1", c.K1},
           {"K2", c.K2}, {"K3", c.K3}, {"provenance", std::string(to_string(c.provenance))}};
}

void from_json(const json& j, RegularityConstants& c) {
  c.m = j.at("m").get<double>();
  c.M = j.at("M").get<double>();
  c.K1 = j.at("K1").get<double>();
  c.K2 = j.at("K2").get<double>();
  c.K3 = j.at("K3").get<double>();
  const std::string p = j.value("provenance", std::string("declared"));
  if (p == "declared") {
    c.provenance = ConstantsProvenance::declared;
  } else if (p == "empirical-over-trajectory") {
    c.provenance = ConstantsProvenance::empirical;
  } else {
    throw ConfigError("unknown constants provenance '" + p + "'");
  }
}

void to_json(json& j, const BoundReport& r) {
  j = json{{"inputs",
            {{"constants", r.inputs.constants},
             {"alpha", r.inputs.alpha},
             {"delta", r.inputs.delta},
             {"epsilon", r.inputs.epsilon}}},
           {"psi", real(r.psi)},
           {"kappa", real(r.kappa)},
           {"rho", real(r.rho)},
           {"gamma", real(r.gamma)},
           {"gamma_prime", real(r.gamma_prime)},
           {"mu_alg13", real(r.mu_alg13)},
           {"mu_alg3_printed", real(r.mu_alg3_printed)},
           {"mu_alg4", real(r.mu_alg4)},
           {"eta", real(r.eta)},
           {"E1", real(r.E1)},
           {"E2", real(r.E2)},
           {"E3", real(r.E3)},
           {"E3_printed", real(r.E3_printed)},
           {"E4", real(r.E4)},
           {"delta_max_lemma2", real(r.delta_max_lemma2)},
           {"delta_max_remark3", real(r.delta_max_remark3)},
           {"alpha_warning", r.alpha_warning}};
}

void from_json(const json& j, BoundReport& r) {
  const json& in = j.at("inputs");
  r.inputs.constants = in.at("constants").get<RegularityConstants>();
  r.inputs.alpha = in.at("alpha").get<double>();
  r.inputs.delta = in.at("delta").get<double>();
  r.inputs.epsilon = in.at("epsilon").get<double>();
  r.psi = get_real(j, "psi");
  r.kappa = get_real(j, "kappa");
  r.rho = get_real(j, "rho");
  r.gamma = get_real(j, "gamma");
  r.gamma_prime = get_real(j, "gamma_prime");
  r.mu_alg13 = get_real(j, "mu_alg13");
  r.mu_alg3_printed = get_real(j, "mu_alg3_printed");
  r.mu_alg4 = get_real(j, "mu_alg4");
  r.eta = get_real(j, "eta");
  r.E1 = get_real(j, "E1");
  r.E2 = get_real(j, "E2");
  r.E3 = get_real(j, "E3");
  r.E3_printed = get_real(j, "E3_printed");
  r.E4 = get_real(j, "E4");
  r.delta_max_lemma2 = get_real(j, "delta_max_lemma2");
  r.delta_max_remark3 = get_real(j, "delta_max_remark3");
  r.alpha_warning = j.at("alpha_warning").get<bool>();
}

void to_json(json& j, const BoundCheck& c) {
  j = json{{"holds", c.holds},
           {"worst_margin", real(c.worst_margin)},
           {"worst_k", c.worst_k},
           {"neighborhood", real(c.neighborhood)},
           {"branch_counts", c.branch_counts}};
}

void to_json(json& j, const ErrorSummary& s) {
  j = json{{"max_tail", real(s.max_tail)},
           {"mean_tail", real(s.mean_tail)},
           {"tail_count", s.tail_count},
           {"first_k_below", s.first_k_below ? json(*s.first_k_below) : json(nullptr)}};
}

void to_json(json& j, const MpcConfig& c) {
  j = json{{"Hp", c.Hp},         {"Hu", c.Hu},       {"lambda", c.lambda}, {"delta", c.delta},
           {"sim_steps", c.sim_steps}, {"x_h0", c.x_h0}, {"y_h0", c.y_h0},   {"u_init", c.u_init}};
}

void from_json(const json& j, MpcConfig& c) {
  const MpcConfig d;
  c.Hp = j.value("Hp", d.Hp);
  c.Hu = j.value("Hu", c.Hp);
  c.lambda = j.value("lambda", d.lambda);
  c.delta = j.value("delta", d.delta);
  c.sim_steps = j.value("sim_steps", d.sim_steps);
  c.x_h0 = j.value("x_h0", d.x_h0);
  c.y_h0 = j.value("y_h0", d.y_h0);
  c.u_init = j.value("u_init", d.u_init);
}

// ---------------------------------------------------------------------------
// CSV

namespace {

void put(std::ostream& os, double v) { os << v; }

void put(std::ostream& os, const std::optional<double>& v) {
  if (v) os << *v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_real(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("csv line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

std::optional<double> parse_optional(const std::string& s, std::size_t line) {
  if (s.empty()) return std::nullopt;
  return parse_real(s, line);
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  const std::size_t n = traj.records.empty() ? traj.config.x0.size() : traj.records.front().x.size();
  os << "k,t,f,f_star,err_f,err_x,grad_norm,branch";
  for (std::size_t i = 0; i < n; ++i) os << ",x" << i;
  os << '\n';
  for (const StepRecord& r : traj.records) {
    os << r.k << ',';
    put(os, r.t);
    os << ',';
    put(os, r.f);
    os << ',';
    put(os, r.f_star);
    os << ',';
    put(os, r.err_f);
    os << ',';
    put(os, r.err_x);
    os << ',';
    put(os, r.grad_norm);
    os << ',' << to_string(r.branch);
    for (double v : r.x) {
      os << ',';
      put(os, v);
    }
    os << '\n';
  }
  os.precision(old_precision);
}

std::vector<StepRecord> read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("csv: empty input");
  const std::vector<std::string> header = split(strip_cr(line));
  static const char* fixed[] = {"k", "t", "f", "f_star", "err_f", "err_x", "grad_norm", "branch"};
  if (header.size() < 8) throw std::runtime_error("csv: header too short");
  for (std::size_t i = 0; i < 8; ++i)
    if (header[i] != fixed[i]) throw std::runtime_error("csv: unexpected column '" + header[i] + "'");
  const std::size_t n = header.size() - 8;

  std::vector<StepRecord> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> c = split(line);
    if (c.size() != header.size()) throw std::runtime_error("csv line " + std::to_string(lineno) + ": wrong field count");
    StepRecord r;
    r.k = static_cast<std::size_t>(parse_real(c[0], lineno));
    r.t = parse_real(c[1], lineno);
    r.f = parse_real(c[2], lineno);
    r.f_star = parse_optional(c[3], lineno);
    r.err_f = parse_optional(c[4], lineno);
    r.err_x = parse_optional(c[5], lineno);
    r.grad_norm = parse_real(c[6], lineno);
    r.branch = parse_branch(c[7]);
    r.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.x[i] = parse_real(c[8 + i], lineno);
    out.push_back(std::move(r));
  }
  return out;
}

void write_robot_path_csv(std::ostream& os, const std::vector<RobotPathRow>& rows) {
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  os << "k,t,x_h,y_h,r_x,r_y\n";
  for (const RobotPathRow& r : rows)
    os << r.k << ',' << r.t << ',' << r.x_h << ',' << r.y_h << ',' << r.r_x << ',' << r.r_y << '\n';
  os.precision(old_precision);
}

std::vector<RobotPathRow> read_robot_path_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || strip_cr(line) != "k,t,x_h,y_h,r_x,r_y")
    throw std::runtime_error("csv: expected robot path header");
  std::vector<RobotPathRow> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> c = split(line);
    if (c.size() != 6) throw std::runtime_error("csv line " + std::to_string(lineno) + ": wrong field count");
    out.push_back({static_cast<std::size_t>(parse_real(c[0], lineno)), parse_real(c[1], lineno),
                   parse_real(c[2], lineno), parse_real(c[3], lineno), parse_real(c[4], lineno),
                   parse_real(c[5], lineno)});
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace tvopt
