#ifndef CRFVE_GMRES_HPP_
#define CRFVE_GMRES_HPP_

#include <functional>
#include <vector>

#include "crfve/linalg.hpp"

namespace crfve {

// Inner product <x, y> = x^T G y for a symmetric positive definite G. The
// default-constructed object is the Euclidean product.
class InnerProduct {
 public:
  InnerProduct() = default;
  explicit InnerProduct(const SparseMatrix& gram) : gram_(&gram) {}

  // Returns G x.
  Vector apply(const Vector& x) const { return gram_ ? Vector(*gram_ * x) : x; }
  bool euclidean() const { return gram_ == nullptr; }

 private:
  const SparseMatrix* gram_ = nullptr;
};

enum class StoppingNorm {
  kEuclidean,  // ||r||_2 / ||r_0||_2 <= tol
  kInner,      // same ratio in the Arnoldi inner-product norm
  kMonitor,    // GmresOptions::monitor(x_m) <= tol
};

struct GmresOptions {
  double tolerance = 1e-6;
  int max_iterations = 200;
  StoppingNorm stopping = StoppingNorm::kEuclidean;
  // Optional relative residual of the current iterate in some other norm,
  // e.g. the residual of an unpreconditioned system. Evaluated every step
  // when set; required for kMonitor.
  std::function<double(const Vector& iterate)> monitor;
};

struct KrylovTrace {
  // Relative residual norms, entry 0 is 1. Both have iterations + 1 entries.
  std::vector<double> residual_l2;
  std::vector<double> residual_inner;  // minimized quantity, nonincreasing
  std::vector<double> residual_monitor;  // GmresOptions::monitor values, if set
  double initial_l2 = 0.0;
  double initial_inner = 0.0;
  int iterations = 0;
  bool converged = false;
  bool breakdown = false;
  // (iterations + 1) x iterations upper Hessenberg matrix of the Arnoldi process.
  DenseMatrix hessenberg;
  // Inner-orthonormal Arnoldi basis, iterations + 1 vectors (fewer on breakdown).
  std::vector<Vector> basis;
};

struct GmresResult {
  Vector solution;
  KrylovTrace trace;
};

// Full (non-restarted) GMRES from a zero initial guess. Arnoldi runs in `inner`
// with modified Gram-Schmidt and one reorthogonalization pass, so the method
// minimizes the residual in the norm of `inner`.
GmresResult gmres(const LinearOperator& op, const Vector& rhs, const InnerProduct& inner,
                  const GmresOptions& options = {});

struct ConvergenceEstimates {
  double cp = 0.0;  // min eigenvalue of the symmetric part of H_m
  double Cp = 0.0;  // largest singular value of the rectangular H_m
};

// Ritz-type estimates of the field-of-values bound c_p and operator norm C_p
// from the first `steps` Arnoldi columns (all of them when steps < 0).
// Throws InsufficientData with fewer than two steps.
ConvergenceEstimates estimate_cp_Cp(const KrylovTrace& trace, int steps = -1);

}  // namespace crfve

#endif  // CRFVE_GMRES_HPP_
