#include "crfve/gmres.hpp"

#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "crfve/errors.hpp"

namespace crfve {
namespace {

LinearOperator dense_op(const DenseMatrix& a) {
  return [a](const Vector& x, Vector& y) { y = a * x; };
}

// Nonsymmetric matrix with positive definite symmetric part.
DenseMatrix convection_matrix(int n, double skew) {
  DenseMatrix a = DenseMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = 2.0 + 0.1 * i;
    if (i + 1 < n) {
      a(i, i + 1) = -1.0 + skew;
      a(i + 1, i) = -1.0 - skew;
    }
  }
  return a;
}

SparseMatrix spd_gram(int n) {
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 3.0);
    if (i > 0) t.emplace_back(i, i - 1, -1.0);
    if (i + 1 < n) t.emplace_back(i, i + 1, -1.0);
  }
  SparseMatrix g(n, n);
  g.setFromTriplets(t.begin(), t.end());
  return g;
}

Vector random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  Vector x(n);
  for (int i = 0; i < n; ++i) x[i] = normal(rng);
  return x;
}

TEST(Gmres, IdentityConvergesInOneStep) {
  const Vector b = random_vector(10, 1);
  const GmresResult r = gmres([](const Vector& x, Vector& y) { y = x; }, b, InnerProduct());
  EXPECT_TRUE(r.trace.converged);
  EXPECT_EQ(r.trace.iterations, 1);
  EXPECT_LT((r.solution - b).norm(), 1e-14);
}

TEST(Gmres, TwoByTwoDiagonalSolvedExactly) {
  DenseMatrix a = DenseMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  const Vector b = Vector::Ones(2);
  GmresOptions opts;
  opts.tolerance = 1e-12;
  const GmresResult r = gmres(dense_op(a), b, InnerProduct(), opts);
  EXPECT_TRUE(r.trace.converged);
  EXPECT_LE(r.trace.iterations, 2);
  EXPECT_NEAR(r.solution[0], 1.0, 1e-13);
  EXPECT_NEAR(r.solution[1], 0.5, 1e-13);
}

TEST(Gmres, HistoriesStartAtOneAndHaveIterationsPlusOneEntries) {
  const DenseMatrix a = convection_matrix(30, 0.3);
  const GmresResult r = gmres(dense_op(a), random_vector(30, 2), InnerProduct());
  const KrylovTrace& t = r.trace;
  EXPECT_EQ(static_cast<int>(t.residual_l2.size()), t.iterations + 1);
  EXPECT_EQ(static_cast<int>(t.residual_inner.size()), t.iterations + 1);
  EXPECT_EQ(t.residual_l2.front(), 1.0);
  EXPECT_EQ(t.residual_inner.front(), 1.0);
  EXPECT_TRUE(t.residual_monitor.empty());
  EXPECT_LE(t.residual_l2.back(), 1e-6);
  EXPECT_EQ(t.hessenberg.rows(), t.iterations + 1);
  EXPECT_EQ(t.hessenberg.cols(), t.iterations);
}

// Field-of-values bound ||r_j|| <= (1 - c^2/C^2)^(j/2) ||r_0|| with c the
// smallest eigenvalue of the symmetric part and C the spectral norm.
TEST(Gmres, SatisfiesFieldOfValuesBound) {
  for (double skew : {0.0, 0.5, 1.5}) {
    const DenseMatrix a = convection_matrix(40, skew);
    const DenseMatrix sym = 0.5 * (a + a.transpose());
    const double c = Eigen::SelfAdjointEigenSolver<DenseMatrix>(sym).eigenvalues().minCoeff();
    const double big_c = Eigen::JacobiSVD<DenseMatrix>(a).singularValues()(0);
    ASSERT_GT(c, 0.0);
    const double rate = std::sqrt(1.0 - c * c / (big_c * big_c));
    GmresOptions opts;
    opts.tolerance = 1e-12;
    const GmresResult r = gmres(dense_op(a), random_vector(40, 3), InnerProduct(), opts);
    for (std::size_t j = 0; j < r.trace.residual_l2.size(); ++j) {
      EXPECT_LE(r.trace.residual_l2[j], std::pow(rate, j) * (1.0 + 1e-8)) << "skew " << skew << " j " << j;
    }
  }
}

TEST(Gmres, InnerResidualIsNonincreasingAndMatchesTrueResidual) {
  const int n = 50;
  const DenseMatrix a = convection_matrix(n, 0.7);
  const SparseMatrix g = spd_gram(n);
  const InnerProduct inner(g);
  const Vector b = random_vector(n, 4);
  GmresOptions opts;
  opts.stopping = StoppingNorm::kInner;
  opts.tolerance = 1e-9;
  opts.max_iterations = 25;  // stop early so the comparison is not at round-off
  const GmresResult r = gmres(dense_op(a), b, inner, opts);
  const auto& hist = r.trace.residual_inner;
  for (std::size_t j = 1; j < hist.size(); ++j) EXPECT_LE(hist[j], hist[j - 1] * (1.0 + 1e-12));
  const Vector res = b - a * r.solution;
  const double true_inner = std::sqrt(res.dot(g * res) / b.dot(g * b));
  const double true_l2 = res.norm() / b.norm();
  EXPECT_NEAR(hist.back(), true_inner, 1e-8);
  EXPECT_NEAR(r.trace.residual_l2.back(), true_l2, 1e-8);
}

TEST(Gmres, ArnoldiBasisIsInnerOrthonormalAndSatisfiesRecurrence) {
  const int n = 40;
  const DenseMatrix a = convection_matrix(n, 0.9);
  const SparseMatrix g = spd_gram(n);
  GmresOptions opts;
  opts.max_iterations = 15;
  opts.tolerance = 1e-14;
  const GmresResult r = gmres(dense_op(a), random_vector(n, 5), InnerProduct(g), opts);
  const int m = r.trace.iterations;
  ASSERT_EQ(static_cast<int>(r.trace.basis.size()), m + 1);
  DenseMatrix v(n, m + 1);
  for (int j = 0; j <= m; ++j) v.col(j) = r.trace.basis[j];
  const DenseMatrix gram = v.transpose() * DenseMatrix(g) * v;
  EXPECT_LT((gram - DenseMatrix::Identity(m + 1, m + 1)).cwiseAbs().maxCoeff(), 1e-12);
  const DenseMatrix lhs = a * v.leftCols(m);
  const DenseMatrix rhs = v * r.trace.hessenberg;
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(Gmres, MonitorDrivesStopping) {
  const DenseMatrix a = convection_matrix(30, 0.2);
  const Vector b = random_vector(30, 6);
  GmresOptions opts;
  opts.stopping = StoppingNorm::kMonitor;
  opts.tolerance = 1e-4;
  int calls = 0;
  opts.monitor = [&](const Vector& x) {
    ++calls;
    return (b - a * x).lpNorm<Eigen::Infinity>() / b.lpNorm<Eigen::Infinity>();
  };
  const GmresResult r = gmres(dense_op(a), b, InnerProduct(), opts);
  EXPECT_TRUE(r.trace.converged);
  EXPECT_EQ(static_cast<int>(r.trace.residual_monitor.size()), r.trace.iterations + 1);
  EXPECT_LE(r.trace.residual_monitor.back(), 1e-4);
  EXPECT_GT(r.trace.residual_monitor[r.trace.iterations - 1], 1e-4);
  EXPECT_GE(calls, r.trace.iterations);
}

TEST(Gmres, IterationCapReportsNotConverged) {
  const DenseMatrix a = convection_matrix(60, 0.5);
  GmresOptions opts;
  opts.max_iterations = 3;
  opts.tolerance = 1e-14;
  const GmresResult r = gmres(dense_op(a), random_vector(60, 7), InnerProduct(), opts);
  EXPECT_FALSE(r.trace.converged);
  EXPECT_EQ(r.trace.iterations, 3);
}

TEST(Gmres, ZeroRightHandSideGivesZeroSolution) {
  const GmresResult r =
      gmres(dense_op(convection_matrix(5, 0.1)), Vector::Zero(5), InnerProduct());
  EXPECT_TRUE(r.trace.converged);
  EXPECT_EQ(r.trace.iterations, 0);
  EXPECT_EQ(r.solution.norm(), 0.0);
}

TEST(Gmres, InvalidOptionsThrow) {
  GmresOptions opts;
  opts.stopping = StoppingNorm::kMonitor;  // no monitor supplied
  EXPECT_THROW(gmres(dense_op(convection_matrix(4, 0.0)), Vector::Ones(4), InnerProduct(), opts),
               InvalidParameter);
  opts = {};
  opts.tolerance = -1.0;
  EXPECT_THROW(gmres(dense_op(convection_matrix(4, 0.0)), Vector::Ones(4), InnerProduct(), opts),
               InvalidParameter);
}

TEST(ConvergenceEstimates, NestedAndWithinTrueBounds) {
  const DenseMatrix a = convection_matrix(60, 0.8);
  GmresOptions opts;
  opts.tolerance = 1e-13;
  const GmresResult r = gmres(dense_op(a), random_vector(60, 8), InnerProduct(), opts);
  const DenseMatrix sym = 0.5 * (a + a.transpose());
  const double c = Eigen::SelfAdjointEigenSolver<DenseMatrix>(sym).eigenvalues().minCoeff();
  const double big_c = Eigen::JacobiSVD<DenseMatrix>(a).singularValues()(0);
  double prev_cp = INFINITY;
  double prev_big = 0.0;
  for (int k = 2; k <= r.trace.iterations; ++k) {
    const ConvergenceEstimates e = estimate_cp_Cp(r.trace, k);
    EXPECT_LE(e.cp, prev_cp + 1e-12);
    EXPECT_GE(e.Cp, prev_big - 1e-12);
    EXPECT_GE(e.cp, c - 1e-10);
    EXPECT_LE(e.Cp, big_c + 1e-10);
    prev_cp = e.cp;
    prev_big = e.Cp;
  }
  const ConvergenceEstimates all = estimate_cp_Cp(r.trace);
  EXPECT_EQ(all.cp, prev_cp);
  EXPECT_EQ(all.Cp, prev_big);
}

TEST(ConvergenceEstimates, RequireTwoSteps) {
  const GmresResult r = gmres([](const Vector& x, Vector& y) { y = 2.0 * x; }, Vector::Ones(3),
                              InnerProduct());
  EXPECT_THROW(estimate_cp_Cp(r.trace), InsufficientData);
}

}  // namespace
}  // namespace crfve
