#include "crfve/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <thread>
#include <cmath>
#include <ostream>

#include "crfve/assembly.hpp"
#include "crfve/coefficient.hpp"
#include "crfve/errors.hpp"

namespace crfve {

std::string to_string(StoppingRule rule) {
  switch (rule) {
    case StoppingRule::kUnpreconditioned: return "unpreconditioned";
    case StoppingRule::kPreconditioned: return "preconditioned";
    case StoppingRule::kEnergy: return "energy";
  }
  return "unknown";
}

StoppingRule parse_stopping_rule(const std::string& name) {
  if (name == "unpreconditioned") return StoppingRule::kUnpreconditioned;
  if (name == "preconditioned") return StoppingRule::kPreconditioned;
  if (name == "energy") return StoppingRule::kEnergy;
  throw InvalidParameter("unknown stopping rule '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (n < 2) throw InvalidParameter("n must be >= 2");
  if (m < 1 || n % m != 0) {
    throw InvalidParameter("m = " + std::to_string(m) + " does not divide n = " + std::to_string(n));
  }
  if (!(tol > 0.0 && tol < 1.0)) throw InvalidParameter("tol must lie in (0, 1)");
  if (!(alpha1 > 0.0)) throw InvalidParameter("alpha1 must be positive");
  if (freq <= 0) throw InvalidParameter("freq must be positive");
  if (maxit < 1) throw InvalidParameter("maxit must be >= 1");
  if (!preset.empty() && preset_subdomains_per_side(preset) != m) {
    throw InvalidParameter("preset '" + preset + "' needs m = " +
                           std::to_string(preset_subdomains_per_side(preset)));
  }
  for (int k : resolved_mask()) {
    if (k < 0 || k >= m * m) throw InvalidParameter("red mask index out of range");
  }
}

std::vector<int> ExperimentConfig::resolved_mask() const {
  return preset.empty() ? red_mask : preset_mask(preset);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename F>
auto stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    throw StageFailure(name, e.what());
  }
}

}  // namespace

Problem build_problem(int n, int m, CoefficientField coeff, double f, Diagonal diagonal) {
  TriMesh mesh = build_structured_mesh(n, diagonal);
  DofMap dofs = enumerate_cr_dofs(mesh);
  DualMesh dual = build_control_volumes(mesh);
  Partition partition = build_partition(mesh, m);
  AssembledSystem system =
      assemble_system(mesh, dual, dofs, partition, coeff, [f](Point) { return f; });
  return Problem{std::move(mesh), std::move(dofs), std::move(dual), std::move(partition),
                 std::move(coeff), std::move(system)};
}

Problem build_problem(const ExperimentConfig& config) {
  stage("config", [&] { config.validate(); return 0; });
  CoefficientField coeff = stage("coefficient", [&] {
    return make_oscillatory_coefficient(config.freq, config.alpha1, config.resolved_mask());
  });
  return stage("assembly", [&] {
    return build_problem(config.n, config.m, std::move(coeff), config.f, config.diagonal);
  });
}

GmresOptions gmres_options(const ExperimentConfig& config) {
  GmresOptions options;
  options.tolerance = config.tol;
  options.max_iterations = config.maxit;
  switch (config.stopping) {
    case StoppingRule::kUnpreconditioned: options.stopping = StoppingNorm::kMonitor; break;
    case StoppingRule::kPreconditioned: options.stopping = StoppingNorm::kEuclidean; break;
    case StoppingRule::kEnergy: options.stopping = StoppingNorm::kInner; break;
  }
  return options;
}

Report run(const ExperimentConfig& config) {
  Report report;
  report.config = config;

  auto start = Clock::now();
  const Problem problem = build_problem(config);
  const AssembledSystem& system = problem.system;
  report.seconds.assembly = seconds_since(start);
  report.total_dofs = problem.dofs.total;
  report.free_dofs = problem.dofs.free_count();

  start = Clock::now();
  const SchwarzPreconditioner precond = stage("setup", [&] {
    return SchwarzPreconditioner::setup(config.variant, system.fe, system.fv, problem.partition,
                                        problem.dofs);
  });
  report.seconds.setup = seconds_since(start);

  start = Clock::now();
  const GmresOptions options = gmres_options(config);
  SchwarzSolution sol = stage("solve", [&] { return solve(precond, system.fe, system.rhs_fv, options); });
  report.seconds.solve = seconds_since(start);

  const KrylovTrace& trace = sol.gmres.trace;
  report.iterations = trace.iterations;
  report.converged = trace.converged;
  report.residual_l2 = trace.residual_monitor;
  report.residual_preconditioned_l2 = trace.residual_l2;
  report.residual_energy = trace.residual_inner;
  if (trace.iterations >= 2) report.estimates = estimate_cp_Cp(trace);
  report.solution = std::move(sol.solution);
  return report;
}

std::vector<SweepRow> plan_sweep(const SweepSpec& spec) {
  std::vector<SweepRow> rows;
  if (!spec.alphas.empty()) {
    for (double alpha : spec.alphas) {
      SweepRow row;
      row.config = spec.base;
      row.config.alpha1 = alpha;
      rows.push_back(std::move(row));
    }
    return rows;
  }
  for (int n : spec.ns) {
    for (int m : spec.ms) {
      SweepRow row;
      row.config = spec.base;
      row.config.n = n;
      row.config.m = m;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

bool runnable(const ExperimentConfig& config) {
  return config.m >= 1 && config.m < config.n && config.n % config.m == 0;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, int workers) {
  std::vector<SweepRow> rows = plan_sweep(spec);
  const bool alpha_sweep = !spec.alphas.empty();
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (alpha_sweep || runnable(rows[i].config)) todo.push_back(i);
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(rows.size());
  auto worker = [&] {
    for (std::size_t j = next++; j < todo.size(); j = next++) {
      try {
        rows[todo[j]].report = run(rows[todo[j]].config);
      } catch (...) {
        errors[todo[j]] = std::current_exception();
      }
    }
  };
  const int count = std::clamp(workers, 1, static_cast<int>(std::max<std::size_t>(todo.size(), 1)));
  std::vector<std::thread> pool;
  for (int w = 1; w < count; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

void write_table(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kTableHeader << '\n';
  const auto precision = out.precision();
  for (const SweepRow& row : rows) {
    const ExperimentConfig& c = row.config;
    out.precision(6);
    out << c.n << ',' << c.m << ',' << c.freq << ',' << c.alpha1 << ',' << to_string(c.variant) << ',';
    if (row.report) {
      const Report& r = *row.report;
      out << r.iterations << ',';
      out.precision(6);
      if (r.estimates) {
        out << std::scientific << r.estimates->cp << ',' << r.estimates->Cp << std::defaultfloat;
      } else {
        out << ',';
      }
      out.precision(4);
      out << ',' << std::fixed << (r.seconds.assembly + r.seconds.setup + r.seconds.solve)
          << std::defaultfloat;
    } else {
      out << ",,,";
    }
    out << '\n';
  }
  out.precision(precision);
}

HistoryNorm parse_history_norm(const std::string& name) {
  if (name == "energy") return HistoryNorm::kEnergy;
  if (name == "unpreconditioned") return HistoryNorm::kUnpreconditioned;
  if (name == "preconditioned") return HistoryNorm::kPreconditioned;
  throw InvalidParameter("unknown residual norm '" + name + "'");
}

const std::vector<double>& history(const Report& report, HistoryNorm norm) {
  switch (norm) {
    case HistoryNorm::kUnpreconditioned: return report.residual_l2;
    case HistoryNorm::kPreconditioned: return report.residual_preconditioned_l2;
    case HistoryNorm::kEnergy: break;
  }
  return report.residual_energy;
}

void write_residual_history(std::ostream& out, const Report& report, HistoryNorm norm) {
  const std::vector<double>& values = history(report, norm);
  const auto precision = out.precision(17);
  for (std::size_t i = 0; i < values.size(); ++i) out << i << ' ' << values[i] << '\n';
  out.precision(precision);
}

}  // namespace crfve
