#ifndef CRFVE_EXPERIMENT_HPP_
#define CRFVE_EXPERIMENT_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crfve/assembly.hpp"
#include "crfve/coefficient.hpp"
#include "crfve/gmres.hpp"
#include "crfve/mesh.hpp"
#include "crfve/schwarz.hpp"

namespace crfve {

// Which relative residual ends the GMRES iteration.
enum class StoppingRule {
  kUnpreconditioned,  // ||b - B u||_2 / ||b||_2 of the FV system
  kPreconditioned,    // ||g - T u||_2 / ||g||_2
  kEnergy,            // ||g - T u||_a / ||g||_a, the norm GMRES minimizes
};

std::string to_string(StoppingRule rule);
StoppingRule parse_stopping_rule(const std::string& name);

struct ExperimentConfig {
  int n = 32;                // fine blocks per side
  int m = 4;                 // subdomains per side
  int freq = 100;            // base coefficient 2 + sin(freq pi x) sin(freq pi y)
  double alpha1 = 1.0;       // multiplier on the red subdomains
  std::vector<int> red_mask;  // row-major subdomain indices
  std::string preset;         // optional named mask; overrides red_mask
  Variant variant = Variant::kSymmetric;
  double tol = 1e-6;
  int maxit = 200;
  StoppingRule stopping = StoppingRule::kUnpreconditioned;
  double f = 1.0;  // constant right-hand side
  std::uint64_t seed = 20140101;
  Diagonal diagonal = Diagonal::kSouthWestToNorthEast;

  // Throws InvalidParameter when m does not divide n, tol is outside (0,1), ...
  void validate() const;
  std::vector<int> resolved_mask() const;
};

// Everything the solver needs for one discrete problem.
struct Problem {
  TriMesh mesh;
  DofMap dofs;
  DualMesh dual;
  Partition partition;
  CoefficientField coeff;
  AssembledSystem system;
};

// Constant right-hand side f. Throws InvalidParameter for bad n or m.
Problem build_problem(int n, int m, CoefficientField coeff, double f = 1.0,
                      Diagonal diagonal = Diagonal::kSouthWestToNorthEast);
// Mesh, coefficient and assembly stages of run(); failures become StageFailure.
Problem build_problem(const ExperimentConfig& config);

// GMRES options matching a stopping rule.
GmresOptions gmres_options(const ExperimentConfig& config);

struct PhaseTimes {
  double assembly = 0.0;
  double setup = 0.0;
  double solve = 0.0;
};

struct Report {
  ExperimentConfig config;
  int iterations = 0;
  bool converged = false;
  std::optional<ConvergenceEstimates> estimates;
  // Relative residual histories, iterations + 1 entries each, entry 0 is 1.
  std::vector<double> residual_l2;                 // unpreconditioned FV system
  std::vector<double> residual_preconditioned_l2;  // T u = g, l2
  std::vector<double> residual_energy;             // T u = g, energy norm
  PhaseTimes seconds;
  int total_dofs = 0;
  int free_dofs = 0;
  Vector solution;  // free-dof CRFVE solution
};

// Full pipeline mesh -> assemble -> setup -> solve. Stage failures are
// rethrown as StageFailure.
Report run(const ExperimentConfig& config);

// Sweeps reproduce the table layouts: either an alpha1 sweep at fixed (n, m)
// or an (n, m) grid. Grid cells with m >= n or m not dividing n are listed
// with empty result fields.
struct SweepSpec {
  ExperimentConfig base;
  std::vector<double> alphas;  // alpha1 sweep when nonempty
  std::vector<int> ns;         // grid sweep otherwise
  std::vector<int> ms;
};

struct SweepRow {
  ExperimentConfig config;
  std::optional<Report> report;  // empty for skipped cells
};

// Rows in sweep order with empty reports; a row is runnable when m < n and m
// divides n (alpha sweeps are always runnable).
std::vector<SweepRow> plan_sweep(const SweepSpec& spec);
bool runnable(const ExperimentConfig& config);

// Runs every runnable cell, `workers` at a time. Rows come back in sweep order
// and do not depend on the worker count.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, int workers = 1);

inline constexpr const char* kTableHeader = "n,m,freq,alpha1,variant,iters,cp_est,Cp_est,seconds";

void write_table(std::ostream& out, const std::vector<SweepRow>& rows);

enum class HistoryNorm {
  kEnergy,            // minimized by GMRES, nonincreasing
  kUnpreconditioned,  // FV system, l2
  kPreconditioned,    // T u = g, l2
};

HistoryNorm parse_history_norm(const std::string& name);
const std::vector<double>& history(const Report& report, HistoryNorm norm);

// Two columns `iteration relative_residual`.
void write_residual_history(std::ostream& out, const Report& report,
                            HistoryNorm norm = HistoryNorm::kEnergy);

}  // namespace crfve

#endif  // CRFVE_EXPERIMENT_HPP_
