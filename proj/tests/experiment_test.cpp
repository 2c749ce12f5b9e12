#include "crfve/experiment.hpp"

#include <sstream>

#include <gtest/gtest.h>

#include "crfve/errors.hpp"

namespace crfve {
namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n = 8;
  c.m = 4;
  c.freq = 10;
  return c;
}

// CSV with the timing column removed.
std::string strip_seconds(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + '\n';
  return out;
}

TEST(ExperimentConfig, ValidateRejectsBadValues) {
  ExperimentConfig c = small_config();
  EXPECT_NO_THROW(c.validate());
  c.m = 3;
  EXPECT_THROW(c.validate(), InvalidParameter);
  c = small_config();
  c.tol = 1.0;
  EXPECT_THROW(c.validate(), InvalidParameter);
  c = small_config();
  c.alpha1 = 0.0;
  EXPECT_THROW(c.validate(), InvalidParameter);
  c = small_config();
  c.preset = "problem3";  // needs m = 32
  EXPECT_THROW(c.validate(), InvalidParameter);
  c = small_config();
  c.red_mask = {16};
  EXPECT_THROW(c.validate(), InvalidParameter);
}

TEST(ExperimentConfig, PresetOverridesMask) {
  ExperimentConfig c = small_config();
  c.red_mask = {0};
  c.preset = "problem1";
  EXPECT_EQ(c.resolved_mask(), preset_mask("problem1"));
}

TEST(StoppingRule, ParsesNames) {
  for (auto rule : {StoppingRule::kUnpreconditioned, StoppingRule::kPreconditioned, StoppingRule::kEnergy}) {
    EXPECT_EQ(parse_stopping_rule(to_string(rule)), rule);
  }
  EXPECT_THROW(parse_stopping_rule("l1"), InvalidParameter);
}

TEST(Run, ReportShapeAndDofCounts) {
  const Report r = run(small_config());
  EXPECT_TRUE(r.converged);
  EXPECT_GT(r.iterations, 2);
  EXPECT_EQ(r.total_dofs, 3 * 64 + 2 * 8);
  EXPECT_EQ(r.free_dofs, 3 * 64 - 2 * 8);
  for (const auto* hist : {&r.residual_l2, &r.residual_preconditioned_l2, &r.residual_energy}) {
    ASSERT_EQ(static_cast<int>(hist->size()), r.iterations + 1);
    EXPECT_EQ(hist->front(), 1.0);
  }
  EXPECT_LE(r.residual_l2.back(), 1e-6);
  ASSERT_TRUE(r.estimates.has_value());
  EXPECT_GT(r.estimates->cp, 0.0);
  EXPECT_GE(r.estimates->Cp, r.estimates->cp);
  EXPECT_EQ(r.solution.size(), r.free_dofs);
  EXPECT_GE(r.seconds.assembly, 0.0);
}

TEST(Run, StoppingRulesSelectTheMonitoredHistory) {
  ExperimentConfig c = small_config();
  c.stopping = StoppingRule::kPreconditioned;
  EXPECT_LE(run(c).residual_preconditioned_l2.back(), 1e-6);
  c.stopping = StoppingRule::kEnergy;
  EXPECT_LE(run(c).residual_energy.back(), 1e-6);
}

TEST(Run, IsDeterministic) {
  const Report a = run(small_config());
  const Report b = run(small_config());
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.residual_l2, b.residual_l2);
  EXPECT_EQ(a.solution, b.solution);
}

TEST(Run, StageFailureNamesTheStage) {
  ExperimentConfig c = small_config();
  c.m = 3;
  try {
    run(c);
    FAIL() << "expected StageFailure";
  } catch (const StageFailure& e) {
    EXPECT_EQ(e.stage(), "config");
  }
}

TEST(Sweep, AlphaSweepHasOneRowPerAlpha) {
  SweepSpec spec;
  spec.base = small_config();
  spec.alphas = {1, 10, 100, 1e3, 1e4, 1e5, 1e6};
  const auto rows = run_sweep(spec, 3);
  ASSERT_EQ(rows.size(), 7u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].config.alpha1, spec.alphas[i]);
    ASSERT_TRUE(rows[i].report.has_value());
  }
}

TEST(Sweep, GridShapeMatchesLowerTriangularTable) {
  SweepSpec spec;
  spec.ns = {8, 16, 32, 64, 128, 256};
  spec.ms = {4, 8, 16, 32, 64, 128};
  const auto rows = plan_sweep(spec);
  EXPECT_EQ(rows.size(), 36u);
  const auto populated = std::count_if(rows.begin(), rows.end(),
                                       [](const SweepRow& r) { return runnable(r.config); });
  EXPECT_EQ(populated, 21);
}

TEST(Sweep, GridLeavesInvalidCellsEmptyAndIsWorkerIndependent) {
  SweepSpec spec;
  spec.base = small_config();
  spec.ns = {4, 8, 12};
  spec.ms = {2, 4, 8};
  const auto serial = run_sweep(spec, 1);
  const auto parallel = run_sweep(spec, 4);
  ASSERT_EQ(serial.size(), 9u);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].report.has_value(), runnable(serial[i].config));
    EXPECT_EQ(parallel[i].report.has_value(), serial[i].report.has_value());
    if (serial[i].report) EXPECT_EQ(serial[i].report->residual_l2, parallel[i].report->residual_l2);
  }
  std::ostringstream a, b;
  write_table(a, serial);
  write_table(b, parallel);
  EXPECT_EQ(strip_seconds(a.str()), strip_seconds(b.str()));
  // (4,4), (4,8), (8,8) and the cells with m not dividing 12 stay empty.
  EXPECT_NE(a.str().find("\n4,4,10,1,sym,,,,\n"), std::string::npos);
  EXPECT_NE(a.str().find("\n12,8,10,1,sym,,,,\n"), std::string::npos);
}

TEST(Table, EmptySweepIsHeaderOnly) {
  std::ostringstream out;
  write_table(out, run_sweep(SweepSpec{}));
  EXPECT_EQ(out.str(), std::string(kTableHeader) + "\n");
}

TEST(Table, RowFieldsParse) {
  SweepSpec spec;
  spec.base = small_config();
  spec.alphas = {1.0};
  const auto rows = run_sweep(spec);
  std::ostringstream out;
  write_table(out, rows);
  std::istringstream in(out.str());
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  std::vector<std::string> fields;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
  ASSERT_EQ(fields.size(), 9u);
  EXPECT_EQ(fields[0], "8");
  EXPECT_EQ(fields[4], "sym");
  EXPECT_EQ(std::stoi(fields[5]), rows[0].report->iterations);
  EXPECT_NEAR(std::stod(fields[6]), rows[0].report->estimates->cp, 1e-6 * rows[0].report->estimates->cp);
}

std::vector<double> parse_history(const std::string& text) {
  std::istringstream in(text);
  std::vector<double> values;
  int idx;
  double value;
  while (in >> idx >> value) {
    EXPECT_EQ(idx, static_cast<int>(values.size()));
    values.push_back(value);
  }
  return values;
}

TEST(ResidualHistory, EnergyColumnStartsAtOneAndIsMonotone) {
  for (double alpha : {1.0, 1e6}) {
    ExperimentConfig c = small_config();
    c.n = 16;
    c.alpha1 = alpha;
    c.preset = "problem1";
    const Report r = run(c);
    std::ostringstream out;
    write_residual_history(out, r);
    const std::vector<double> values = parse_history(out.str());
    ASSERT_EQ(static_cast<int>(values.size()), r.iterations + 1);
    EXPECT_EQ(values.front(), 1.0);
    for (std::size_t i = 1; i < values.size(); ++i) EXPECT_LE(values[i], values[i - 1]);
    EXPECT_LE(values.back(), 1e-6);
  }
}

TEST(ResidualHistory, SelectableNorms) {
  const Report r = run(small_config());
  for (auto norm : {HistoryNorm::kUnpreconditioned, HistoryNorm::kPreconditioned}) {
    std::ostringstream out;
    write_residual_history(out, r, norm);
    EXPECT_EQ(parse_history(out.str()), history(r, norm));
  }
  EXPECT_EQ(&history(r, HistoryNorm::kUnpreconditioned), &r.residual_l2);
  EXPECT_EQ(parse_history_norm("energy"), HistoryNorm::kEnergy);
  EXPECT_THROW(parse_history_norm("max"), InvalidParameter);
}

}  // namespace
}  // namespace crfve
