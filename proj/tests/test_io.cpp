#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "tvopt/io.hpp"
#include "tvopt/problems.hpp"

using namespace tvopt;

namespace {

Trajectory sample_trajectory() {
  const ScalarTrackingCost f;
  const AnalyticOptimum opt(std::make_shared<ScalarTrackingCost>());
  SolverConfig c;
  c.algorithm = Algorithm::alg3;
  c.t_end = 2.0;
  c.x0 = {100.0};
  return run(f, &opt, c);
}

void expect_same_columns(const StepRecord& a, const StepRecord& b) {
  EXPECT_EQ(a.k, b.k);
  EXPECT_EQ(a.t, b.t);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.branch, b.branch);
  EXPECT_EQ(a.f, b.f);
  EXPECT_EQ(a.f_star, b.f_star);
  EXPECT_EQ(a.err_f, b.err_f);
  EXPECT_EQ(a.err_x, b.err_x);
  EXPECT_EQ(a.grad_norm, b.grad_norm);
}

}  // namespace

TEST(TrajectoryCsv, HeaderAndRoundTrip) {
  const Trajectory t = sample_trajectory();
  std::stringstream ss;
  write_trajectory_csv(ss, t);
  std::string header;
  std::getline(std::istringstream(ss.str()) >> std::ws, header);
  EXPECT_EQ(header, "k,t,f,f_star,err_f,err_x,grad_norm,branch,x0");
  const std::vector<StepRecord> back = read_trajectory_csv(ss);
  ASSERT_EQ(back.size(), t.records.size());
  for (std::size_t i = 0; i < back.size(); ++i) expect_same_columns(back[i], t.records[i]);
}

TEST(TrajectoryCsv, MissingOptimumIsEmptyField) {
  const ScalarTrackingCost f;
  SolverConfig c;
  c.t_end = 0.2;
  c.x0 = {1.0};
  const Trajectory t = run(f, nullptr, c);
  std::stringstream ss;
  write_trajectory_csv(ss, t);
  EXPECT_NE(ss.str().find(",,,"), std::string::npos);
  const std::vector<StepRecord> back = read_trajectory_csv(ss);
  EXPECT_FALSE(back[0].f_star);
}

TEST(TrajectoryCsv, Malformed) {
  std::istringstream bad_header("k,t,f\n");
  EXPECT_THROW(read_trajectory_csv(bad_header), std::runtime_error);
  std::istringstream bad_row("k,t,f,f_star,err_f,err_x,grad_norm,branch,x0\n0,0,abc,,,,1,identity,1\n");
  EXPECT_THROW(read_trajectory_csv(bad_row), std::runtime_error);
  std::istringstream short_row("k,t,f,f_star,err_f,err_x,grad_norm,branch,x0\n0,0,1\n");
  EXPECT_THROW(read_trajectory_csv(short_row), std::runtime_error);
}

TEST(TrajectoryJson, RoundTrip) {
  Trajectory t = sample_trajectory();
  t.warnings.push_back("note");
  const Trajectory back = nlohmann::json::parse(nlohmann::json(t).dump()).get<Trajectory>();
  EXPECT_EQ(back.problem, t.problem);
  EXPECT_EQ(back.warnings, t.warnings);
  EXPECT_EQ(back.config.algorithm, t.config.algorithm);
  EXPECT_EQ(back.config.x0, t.config.x0);
  EXPECT_EQ(back.config.alpha, t.config.alpha);
  ASSERT_EQ(back.records.size(), t.records.size());
  for (std::size_t i = 0; i < back.records.size(); ++i) {
    expect_same_columns(back.records[i], t.records[i]);
    EXPECT_EQ(back.records[i].x_pred, t.records[i].x_pred);
  }
}

TEST(BoundReportJson, RoundTripIncludingInfinity) {
  RegularityConstants c;
  c.K1 = 0.0;
  const BoundReport r = bound_report(c, 0.25, 0.1, 0.3);
  ASSERT_TRUE(std::isinf(r.delta_max_lemma2));
  const nlohmann::json j = r;
  EXPECT_TRUE(j["delta_max_lemma2"].is_null());
  const BoundReport back = nlohmann::json::parse(j.dump()).get<BoundReport>();
  EXPECT_TRUE(std::isinf(back.delta_max_lemma2));
  EXPECT_EQ(back.E1, r.E1);
  EXPECT_EQ(back.kappa, r.kappa);
  EXPECT_EQ(back.inputs.alpha, 0.25);
}

TEST(RobotPathCsv, RoundTrip) {
  const std::vector<RobotPathRow> rows{{0, 0.0, 0.0, 0.0, -1.0, 0.0}, {1, 0.1, 0.1, -0.05, -0.995, 0.0157}};
  std::stringstream ss;
  write_robot_path_csv(ss, rows);
  EXPECT_EQ(ss.str().substr(0, 21), "k,t,x_h,y_h,r_x,r_y\n0");
  const std::vector<RobotPathRow> back = read_robot_path_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].y_h, -0.05);
  EXPECT_EQ(back[1].r_y, 0.0157);
}

TEST(MpcConfigJson, Defaults) {
  const MpcConfig c = nlohmann::json::parse(R"({"Hp": 6, "lambda": 2})").get<MpcConfig>();
  EXPECT_EQ(c.Hp, 6);
  EXPECT_EQ(c.Hu, 6);
  EXPECT_EQ(c.lambda, 2.0);
  EXPECT_EQ(c.sim_steps, 400);
}
