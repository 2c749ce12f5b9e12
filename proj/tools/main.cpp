#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crfve/assembly.hpp"
#include "crfve/errors.hpp"
#include "crfve/experiment.hpp"
#include "crfve/verify.hpp"
#include "settings.hpp"

namespace {

using namespace crfve;
using nlohmann::json;

constexpr int kExitNotConverged = 1;
constexpr int kExitError = 2;

struct CommonOptions {
  std::string config_path;
  std::string out;
  cli::Overrides overrides;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config_path, "JSON config file");
  cmd->add_option("-o,--out", o.out, "Output file (stdout when omitted)");
  cmd->add_option("--n", o.overrides.n, "Fine blocks per side");
  cmd->add_option("--m", o.overrides.m, "Subdomains per side");
  cmd->add_option("--freq", o.overrides.freq, "Oscillation frequency of the base coefficient");
  cmd->add_option("--alpha1", o.overrides.alpha1, "Multiplier on red subdomains");
  cmd->add_option("--variant", o.overrides.variant, "sym or nsym");
  cmd->add_option("--tol", o.overrides.tol, "Relative residual tolerance");
  cmd->add_option("--maxit", o.overrides.maxit, "GMRES iteration cap");
  cmd->add_option("--preset", o.overrides.preset, "problem1, problem2 or problem3");
  cmd->add_option("--stopping", o.overrides.stopping,
                  "unpreconditioned (default), preconditioned or energy");
  cmd->add_option("--diagonal", o.overrides.diagonal, "sw-ne (default) or se-nw");
  cmd->add_option("--red-mask", o.overrides.red_mask, "Row-major red subdomain indices");
}

// Writes to the named file or to stdout.
template <typename F>
void emit(const std::string& path, F&& body) {
  if (path.empty()) {
    body(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidParameter("cannot write '" + path + "'");
  body(out);
}

// Sweep keys may live in the config file next to the experiment keys.
struct SweepKeys {
  std::vector<double> alphas;
  std::vector<int> ns;
  std::vector<int> ms;
  int workers = 1;
};

ExperimentConfig load_with_sweep(const CommonOptions& o, SweepKeys& sweep) {
  if (o.config_path.empty()) return cli::load_config("", o.overrides);
  json doc = cli::read_json_file(o.config_path);
  if (doc.is_object()) {
    if (doc.contains("alphas")) sweep.alphas = doc["alphas"].get<std::vector<double>>();
    if (doc.contains("ns")) sweep.ns = doc["ns"].get<std::vector<int>>();
    if (doc.contains("ms")) sweep.ms = doc["ms"].get<std::vector<int>>();
    if (doc.contains("workers")) sweep.workers = doc["workers"].get<int>();
    for (const char* key : {"alphas", "ns", "ms", "workers"}) doc.erase(key);
  }
  ExperimentConfig config = cli::config_from_json(doc);
  cli::apply(o.overrides, config);
  return config;
}

// Single-run commands share config files with sweeps and ignore sweep keys.
ExperimentConfig load_validated(const CommonOptions& o) {
  SweepKeys unused;
  ExperimentConfig config = load_with_sweep(o, unused);
  config.validate();
  return config;
}

int run_command(const CommonOptions& o, bool histories) {
  const Report report = run(load_validated(o));
  emit(o.out, [&](std::ostream& out) { out << cli::to_json(report, histories).dump(2) << '\n'; });
  return report.converged ? 0 : kExitNotConverged;
}

int table_command(const CommonOptions& o, SweepKeys flags) {
  SweepKeys sweep;
  const ExperimentConfig base = load_with_sweep(o, sweep);
  if (!flags.alphas.empty()) sweep.alphas = flags.alphas;
  if (!flags.ns.empty()) sweep.ns = flags.ns;
  if (!flags.ms.empty()) sweep.ms = flags.ms;
  if (flags.workers > 1) sweep.workers = flags.workers;

  const SweepSpec spec{base, sweep.alphas, sweep.ns, sweep.ms};
  // Fail on a bad config before any cell runs.
  for (const SweepRow& row : plan_sweep(spec)) {
    if (!spec.alphas.empty() || runnable(row.config)) row.config.validate();
  }
  const std::vector<SweepRow> rows = run_sweep(spec, sweep.workers);
  emit(o.out, [&](std::ostream& out) { write_table(out, rows); });
  for (const SweepRow& row : rows) {
    if (row.report && !row.report->converged) return kExitNotConverged;
  }
  return 0;
}

std::string residual_file_name(const ExperimentConfig& c) {
  std::ostringstream name;
  name << "residual_n" << c.n << "_m" << c.m << "_freq" << c.freq << "_alpha" << c.alpha1 << "_"
       << to_string(c.variant) << ".dat";
  return name.str();
}

int plot_command(const CommonOptions& o, const std::vector<double>& alpha_flags,
                 const std::string& dir, HistoryNorm norm) {
  SweepKeys sweep;
  ExperimentConfig base = load_with_sweep(o, sweep);
  if (!alpha_flags.empty()) sweep.alphas = alpha_flags;
  if (sweep.alphas.empty()) sweep.alphas = {base.alpha1};
  std::filesystem::create_directories(dir);
  int status = 0;
  for (double alpha : sweep.alphas) {
    base.alpha1 = alpha;
    base.validate();
    const Report report = run(base);
    const std::filesystem::path path = std::filesystem::path(dir) / residual_file_name(base);
    emit(path.string(), [&](std::ostream& out) { write_residual_history(out, report, norm); });
    std::cout << path.string() << '\n';
    if (!report.converged) status = kExitNotConverged;
  }
  return status;
}

int verify_command(const std::string& out_path, const std::vector<std::string>& checks,
                   bool checks_given, const VerifyOptions& options) {
  std::vector<std::string> subset;
  if (!checks_given) subset = available_checks();
  for (const std::string& name : checks) {
    if (!name.empty()) subset.push_back(name);
  }
  const VerifyReport report = verify(subset, options);
  for (const std::string& w : report.warnings) std::cerr << "warning: " << w << '\n';
  emit(out_path, [&](std::ostream& out) { out << cli::to_json(report).dump(2) << '\n'; });
  return report.passed() ? 0 : kExitNotConverged;
}

int dump_mesh_command(const CommonOptions& o) {
  const ExperimentConfig c = load_validated(o);
  const TriMesh mesh = build_structured_mesh(c.n, c.diagonal);
  emit(o.out, [&](std::ostream& out) { write_mesh(out, mesh); });
  return 0;
}

int dump_matrix_command(const CommonOptions& o, const std::string& which) {
  const Problem p = build_problem(load_validated(o));
  emit(o.out, [&](std::ostream& out) {
    if (which == "fe") {
      write_coordinate(out, p.system.fe);
    } else if (which == "fv") {
      write_coordinate(out, p.system.fv);
    } else {
      out.precision(17);
      for (double v : p.system.rhs_fv) out << v << '\n';
    }
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crouzeix-Raviart finite volume element solver with an additive Schwarz preconditioner"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  bool histories = false;
  auto* run_cmd = app.add_subcommand("run", "Solve one configuration and print a JSON report");
  add_common(run_cmd, run_opts);
  run_cmd->add_flag("--histories", histories, "Include residual histories in the report");

  CommonOptions table_opts;
  SweepKeys table_sweep;
  auto* table_cmd = app.add_subcommand("table", "Run an alpha1 sweep or an (n, m) grid, write CSV");
  add_common(table_cmd, table_opts);
  table_cmd->add_option("--alphas", table_sweep.alphas, "alpha1 values");
  table_cmd->add_option("--ns", table_sweep.ns, "Fine blocks per side (grid sweep)");
  table_cmd->add_option("--ms", table_sweep.ms, "Subdomains per side (grid sweep)");
  table_cmd->add_option("--workers", table_sweep.workers, "Sweep cells run in parallel")
      ->check(CLI::PositiveNumber);

  CommonOptions plot_opts;
  std::vector<double> plot_alphas;
  std::string plot_dir = ".";
  auto* plot_cmd = app.add_subcommand("plot", "Write residual history files, one per alpha1");
  add_common(plot_cmd, plot_opts);
  plot_cmd->add_option("--alphas", plot_alphas, "alpha1 values");
  plot_cmd->add_option("--dir", plot_dir, "Output directory");
  std::string plot_norm = "energy";
  plot_cmd->add_option("--norm", plot_norm, "energy (default), unpreconditioned or preconditioned")
      ->check(CLI::IsMember({"energy", "unpreconditioned", "preconditioned"}));

  std::string verify_out;
  std::vector<std::string> verify_checks;
  VerifyOptions verify_opts;
  auto* verify_cmd = app.add_subcommand("verify", "Run the property checks, print a JSON report");
  verify_cmd->add_option("-o,--out", verify_out, "Output file (stdout when omitted)");
  auto* checks_opt = verify_cmd->add_option("--checks", verify_checks,
                                            "Subset of checks; pass with no names for none")
                         ->expected(0, CLI::detail::expected_max_vector_size);
  verify_cmd->add_option("--freq", verify_opts.freq, "Coefficient frequency");
  verify_cmd->add_option("--seed", verify_opts.seed, "Random probe seed");
  verify_cmd->add_flag("--corrupt-symmetry", verify_opts.corrupt_symmetry,
                       "Perturb the FE matrix before the symmetry check");

  CommonOptions mesh_opts;
  auto* mesh_cmd = app.add_subcommand("dump-mesh", "Write the triangulation as text");
  add_common(mesh_cmd, mesh_opts);

  CommonOptions matrix_opts;
  std::string which = "fv";
  auto* matrix_cmd = app.add_subcommand("dump-matrix", "Write an assembled matrix in coordinate form");
  add_common(matrix_cmd, matrix_opts);
  matrix_cmd->add_option("--which", which, "fe, fv or rhs")
      ->check(CLI::IsMember({"fe", "fv", "rhs"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run_command(run_opts, histories);
    if (*table_cmd) return table_command(table_opts, table_sweep);
    if (*plot_cmd) return plot_command(plot_opts, plot_alphas, plot_dir, parse_history_norm(plot_norm));
    if (*verify_cmd) {
      return verify_command(verify_out, verify_checks, checks_opt->count() > 0, verify_opts);
    }
    if (*mesh_cmd) return dump_mesh_command(mesh_opts);
    if (*matrix_cmd) return dump_matrix_command(matrix_opts, which);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
