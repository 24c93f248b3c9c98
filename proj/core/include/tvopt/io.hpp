#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <nlohmann/json.hpp>

#include "tvopt/bounds.hpp"
#include "tvopt/engine.hpp"
#include "tvopt/mpc.hpp"

namespace tvopt {

// JSON conversions, found by nlohmann::json through ADL. Non-finite reals
// are written as null and read back as +infinity.
void to_json(nlohmann::json& j, const SolverConfig& c);
void from_json(const nlohmann::json& j, SolverConfig& c);
void to_json(nlohmann::json& j, const StepRecord& r);
void from_json(const nlohmann::json& j, StepRecord& r);
void to_json(nlohmann::json& j, const Trajectory& t);
void from_json(const nlohmann::json& j, Trajectory& t);
void to_json(nlohmann::json& j, const RegularityConstants& c);
void from_json(const nlohmann::json& j, RegularityConstants& c);
void to_json(nlohmann::json& j, const BoundReport& r);
void from_json(const nlohmann::json& j, BoundReport& r);
void to_json(nlohmann::json& j, const BoundCheck& c);
void to_json(nlohmann::json& j, const ErrorSummary& s);
void to_json(nlohmann::json& j, const MpcConfig& c);
void from_json(const nlohmann::json& j, MpcConfig& c);

/// Header: k,t,f,f_star,err_f,err_x,grad_norm,branch,x0,x1,...
/// Missing optional values are empty fields. Reals use 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
/// Reads the columns written above. x_pred is not in the CSV and comes back
/// empty. Throws std::runtime_error on malformed input.
std::vector<StepRecord> read_trajectory_csv(std::istream& is);

/// Header: k,t,x_h,y_h,r_x,r_y
void write_robot_path_csv(std::ostream& os, const std::vector<RobotPathRow>& rows);
std::vector<RobotPathRow> read_robot_path_csv(std::istream& is);

void write_text_file(const std::filesystem::path& path, std::string_view text);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace tvopt
