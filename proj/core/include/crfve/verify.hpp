#ifndef CRFVE_VERIFY_HPP_
#define CRFVE_VERIFY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "crfve/linalg.hpp"
#include "crfve/schwarz.hpp"

namespace crfve {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double expected = 0.0;  // threshold or target the measurement is compared with
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  std::vector<std::string> warnings;

  bool passed() const;
};

struct VerifyOptions {
  int freq = 10;
  std::uint64_t seed = 20140101;
  int probes = 10;        // random vectors per projection check
  int discrepancy_trials = 64;  // probe pairs per form_discrepancy call
  // Perturbs one off-diagonal entry of the FE matrix before the symmetry
  // check; used to confirm the check can fail.
  bool corrupt_symmetry = false;
};

// Names accepted by verify(), in execution order: "symmetry",
// "fv_fe_identity", "discrepancy_scaling", "projection", "direct_solve", "gmres_bound".
std::vector<std::string> available_checks();

// Runs the named checks at desk scale. An empty subset runs nothing and
// passes with a warning. Throws InvalidParameter for unknown names.
VerifyReport verify(const std::vector<std::string>& subset, const VerifyOptions& options = {});

// GMRES constants of T in the energy inner product, computed densely:
// cp = min eigenvalue of the symmetric part of L^T T L^-T (A_FE = L L^T),
// Cp = its 2-norm. The energy residual after j steps is bounded by rate^j.
struct ConvergenceBound {
  double cp = 0.0;
  double Cp = 0.0;
  double rate = 1.0;  // sqrt(1 - cp^2 / Cp^2)
};

ConvergenceBound dense_convergence_bound(const SchwarzPreconditioner& precond,
                                         const SparseMatrix& a_fe);

// max |M - M^T| <= tol * max |M|.
CheckResult check_symmetry(const SparseMatrix& matrix, double tol = 1e-12);

}  // namespace crfve

#endif  // CRFVE_VERIFY_HPP_
