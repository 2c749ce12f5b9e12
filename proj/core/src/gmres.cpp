#include "crfve/gmres.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "crfve/errors.hpp"

namespace crfve {

GmresResult gmres(const LinearOperator& op, const Vector& rhs, const InnerProduct& inner,
                  const GmresOptions& options) {
  if (options.max_iterations < 1) throw InvalidParameter("gmres: max_iterations must be >= 1");
  if (!(options.tolerance >= 0.0)) throw InvalidParameter("gmres: tolerance must be >= 0");
  if (options.stopping == StoppingNorm::kMonitor && !options.monitor) {
    throw InvalidParameter("gmres: kMonitor stopping requires a monitor");
  }
  const int dim = static_cast<int>(rhs.size());
  const int maxit = options.max_iterations;

  GmresResult result;
  result.solution = Vector::Zero(dim);
  KrylovTrace& trace = result.trace;

  Vector g_rhs = inner.apply(rhs);
  const double beta = std::sqrt(std::max(rhs.dot(g_rhs), 0.0));
  trace.initial_inner = beta;
  trace.initial_l2 = rhs.norm();
  trace.residual_l2.push_back(1.0);
  trace.residual_inner.push_back(1.0);
  trace.hessenberg = DenseMatrix::Zero(1, 0);
  if (options.monitor) trace.residual_monitor.push_back(options.monitor(result.solution));
  if (beta == 0.0) {
    trace.converged = true;
    return result;
  }

  std::vector<Vector>& basis = trace.basis;
  std::vector<Vector> g_basis;  // G v_i, so inner products are plain dots
  basis.push_back(rhs / beta);
  g_basis.push_back(g_rhs / beta);

  DenseMatrix h = DenseMatrix::Zero(maxit + 1, maxit);
  DenseMatrix r = DenseMatrix::Zero(maxit + 1, maxit);  // Givens-rotated h
  Vector cs = Vector::Zero(maxit), sn = Vector::Zero(maxit);
  Vector s = Vector::Zero(maxit + 1);
  s[0] = beta;
  Vector y;

  Vector w(dim);
  for (int j = 0; j < maxit; ++j) {
    op(basis[j], w);
    const double w_norm = std::sqrt(std::max(w.dot(inner.apply(w)), 0.0));
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) {
        const double c = w.dot(g_basis[i]);
        h(i, j) += c;
        w -= c * basis[i];
      }
    }
    Vector gw = inner.apply(w);
    const double next = std::sqrt(std::max(w.dot(gw), 0.0));
    h(j + 1, j) = next;
    trace.iterations = j + 1;
    trace.breakdown = !(next > 1e-14 * w_norm);
    if (!trace.breakdown) {
      basis.push_back(w / next);
      g_basis.push_back(gw / next);
    }

    // Least-squares update via Givens rotations.
    r.col(j).head(j + 2) = h.col(j).head(j + 2);
    for (int i = 0; i < j; ++i) {
      const double a = r(i, j), b = r(i + 1, j);
      r(i, j) = cs[i] * a + sn[i] * b;
      r(i + 1, j) = -sn[i] * a + cs[i] * b;
    }
    const double rho = std::hypot(r(j, j), r(j + 1, j));
    cs[j] = rho == 0.0 ? 1.0 : r(j, j) / rho;
    sn[j] = rho == 0.0 ? 0.0 : r(j + 1, j) / rho;
    r(j, j) = rho;
    r(j + 1, j) = 0.0;
    s[j + 1] = -sn[j] * s[j];
    s[j] = cs[j] * s[j];

    y = r.topLeftCorner(j + 1, j + 1).triangularView<Eigen::Upper>().solve(s.head(j + 1));

    // Residual vector r_j = V_{j+1} (beta e_1 - H y), evaluated in l2.
    Vector coeffs = -h.topLeftCorner(j + 2, j + 1) * y;
    coeffs[0] += beta;
    Vector residual = Vector::Zero(dim);
    const int available = static_cast<int>(basis.size());
    for (int i = 0; i < std::min(j + 2, available); ++i) residual += coeffs[i] * basis[i];

    const double rel_inner = std::abs(s[j + 1]) / beta;
    const double rel_l2 = residual.norm() / trace.initial_l2;
    trace.residual_inner.push_back(rel_inner);
    trace.residual_l2.push_back(rel_l2);

    double monitored = options.stopping == StoppingNorm::kEuclidean ? rel_l2 : rel_inner;
    if (options.monitor) {
      Vector iterate = Vector::Zero(dim);
      for (int i = 0; i <= j; ++i) iterate += y[i] * basis[i];
      trace.residual_monitor.push_back(options.monitor(iterate));
      if (options.stopping == StoppingNorm::kMonitor) monitored = trace.residual_monitor.back();
    }
    if (monitored <= options.tolerance || trace.breakdown) {
      trace.converged = true;
      break;
    }
  }

  for (int i = 0; i < static_cast<int>(y.size()); ++i) result.solution += y[i] * basis[i];
  trace.hessenberg = h.topLeftCorner(trace.iterations + 1, trace.iterations);
  return result;
}

ConvergenceEstimates estimate_cp_Cp(const KrylovTrace& trace, int steps) {
  const int m = steps < 0 ? trace.iterations : std::min(steps, trace.iterations);
  if (m < 2) {
    throw InsufficientData("estimate_cp_Cp: need at least 2 Arnoldi steps, have " +
                           std::to_string(m));
  }
  const DenseMatrix square = trace.hessenberg.topLeftCorner(m, m);
  const DenseMatrix sym = 0.5 * (square + square.transpose());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(sym, Eigen::EigenvaluesOnly);
  const DenseMatrix rect = trace.hessenberg.topLeftCorner(m + 1, m);
  Eigen::JacobiSVD<DenseMatrix> svd(rect);
  return {eig.eigenvalues().minCoeff(), svd.singularValues().maxCoeff()};
}

}  // namespace crfve
