#include "crfve/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "crfve/errors.hpp"

namespace crfve {

namespace {

Point edge_midpoint(const std::array<Point, 3>& c, int local_edge) {
  return 0.5 * (c[(local_edge + 1) % 3] + c[(local_edge + 2) % 3]);
}

int dof_column(const DofMap& dofs, BoundaryTreatment bc, int edge) {
  return bc == BoundaryTreatment::kKeep ? edge : dofs.free_index[edge];
}

int dimension(const DofMap& dofs, BoundaryTreatment bc) {
  return bc == BoundaryTreatment::kKeep ? dofs.total : dofs.free_count();
}

std::vector<std::array<Eigen::Vector2d, 3>> all_gradients(const TriMesh& mesh) {
  std::vector<std::array<Eigen::Vector2d, 3>> grads(mesh.triangles.size());
  for (int t = 0; t < mesh.triangle_count(); ++t) grads[t] = cr_gradients(mesh.corners(t));
  return grads;
}

}  // namespace

std::array<Eigen::Vector2d, 3> cr_gradients(const std::array<Point, 3>& c) {
  const double twice_area = (c[1].x - c[0].x) * (c[2].y - c[0].y) -
                            (c[2].x - c[0].x) * (c[1].y - c[0].y);
  const double scale = std::max({dot(c[1] - c[0], c[1] - c[0]), dot(c[2] - c[0], c[2] - c[0]),
                                 dot(c[2] - c[1], c[2] - c[1])});
  if (!(std::abs(twice_area) > 1e-14 * scale)) {
    throw SingularGeometry("degenerate triangle: area is zero");
  }
  std::array<Eigen::Vector2d, 3> grads;
  for (int i = 0; i < 3; ++i) {
    const Point& p = c[(i + 1) % 3];
    const Point& q = c[(i + 2) % 3];
    // grad(lambda_i) = (p.y - q.y, q.x - p.x) / (2|tau|); grad(phi_i) = -2 grad(lambda_i)
    grads[i] = Eigen::Vector2d(p.y - q.y, q.x - p.x) * (-2.0 / twice_area);
  }
  return grads;
}

Eigen::Matrix3d local_cr_stiffness(const std::array<Point, 3>& corners,
                                   const std::array<Tensor2, 3>& coeff) {
  const auto grads = cr_gradients(corners);
  const double area = 0.5 * std::abs((corners[1].x - corners[0].x) * (corners[2].y - corners[0].y) -
                                     (corners[2].x - corners[0].x) * (corners[1].y - corners[0].y));
  const Tensor2 mean = (coeff[0] + coeff[1] + coeff[2]) / 3.0;
  Eigen::Matrix3d k;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) k(i, j) = area * grads[i].dot(mean * grads[j]);
  }
  return k;
}

SparseMatrix assemble_fe(const TriMesh& mesh, const DofMap& dofs, const Partition& partition,
                         const CoefficientField& coeff, BoundaryTreatment bc) {
  std::vector<Triplet> triplets;
  triplets.reserve(9 * mesh.triangles.size());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto corners = mesh.corners(t);
    const int k = partition.triangle_subdomain[t];
    std::array<Tensor2, 3> a;
    for (int q = 0; q < 3; ++q) a[q] = coeff.tensor(k, edge_midpoint(corners, q));
    const Eigen::Matrix3d local = local_cr_stiffness(corners, a);
    for (int i = 0; i < 3; ++i) {
      const int row = dof_column(dofs, bc, mesh.triangle_edges[t][i]);
      if (row < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int col = dof_column(dofs, bc, mesh.triangle_edges[t][j]);
        if (col >= 0) triplets.emplace_back(row, col, local(i, j));
      }
    }
  }
  const int dim = dimension(dofs, bc);
  SparseMatrix matrix(dim, dim);
  matrix.setFromTriplets(triplets.begin(), triplets.end());
  return matrix;
}

SparseMatrix assemble_fv(const TriMesh& mesh, const DualMesh& dual, const DofMap& dofs,
                         const Partition& partition, const CoefficientField& coeff,
                         BoundaryTreatment bc) {
  const auto grads = all_gradients(mesh);
  std::vector<Triplet> triplets;
  triplets.reserve(20 * mesh.edges.size());
  for (int e = 0; e < mesh.edge_count(); ++e) {
    const int row = dof_column(dofs, bc, e);
    if (row < 0) continue;
    for (const auto& seg : dual.volumes[e].segments) {
      const int t = seg.triangle;
      const Tensor2 a = coeff.tensor(partition.triangle_subdomain[t], seg.midpoint());
      const Eigen::Vector2d weighted_normal = a.transpose() * Eigen::Vector2d(seg.normal.x, seg.normal.y) * seg.length;
      for (int j = 0; j < 3; ++j) {
        const int col = dof_column(dofs, bc, mesh.triangle_edges[t][j]);
        if (col >= 0) triplets.emplace_back(row, col, -grads[t][j].dot(weighted_normal));
      }
    }
  }
  const int dim = dimension(dofs, bc);
  SparseMatrix matrix(dim, dim);
  matrix.setFromTriplets(triplets.begin(), triplets.end());
  return matrix;
}

Vector assemble_rhs_fv(const TriMesh& mesh, const DofMap& dofs, const Source& f,
                       BoundaryTreatment bc) {
  Vector rhs = Vector::Zero(dimension(dofs, bc));
  for (int e = 0; e < mesh.edge_count(); ++e) {
    const int row = dof_column(dofs, bc, e);
    if (row < 0) continue;
    const auto& edge = mesh.edges[e];
    const Point a = mesh.vertices[edge.vertices[0]];
    const Point b = mesh.vertices[edge.vertices[1]];
    for (int t : edge.triangles) {
      if (t < 0) continue;
      const Point c = mesh.centroid(t);
      const double piece = std::abs(mesh.signed_area(t)) / 3.0;
      rhs[row] += piece / 3.0 * (f(0.5 * (a + b)) + f(0.5 * (b + c)) + f(0.5 * (c + a)));
    }
  }
  return rhs;
}

Vector assemble_rhs_fe(const TriMesh& mesh, const DofMap& dofs, const Source& f,
                       BoundaryTreatment bc) {
  // phi_m is 1 at its own midpoint and 0 at the other two.
  Vector rhs = Vector::Zero(dimension(dofs, bc));
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const double third = std::abs(mesh.signed_area(t)) / 3.0;
    for (int i = 0; i < 3; ++i) {
      const int e = mesh.triangle_edges[t][i];
      const int row = dof_column(dofs, bc, e);
      if (row >= 0) rhs[row] += third * f(mesh.midpoint(e));
    }
  }
  return rhs;
}

AssembledSystem assemble_system(const TriMesh& mesh, const DualMesh& dual, const DofMap& dofs,
                                const Partition& partition, const CoefficientField& coeff,
                                const Source& f) {
  AssembledSystem system;
  system.fe = assemble_fe(mesh, dofs, partition, coeff);
  system.fv = assemble_fv(mesh, dual, dofs, partition, coeff);
  system.rhs_fv = assemble_rhs_fv(mesh, dofs, f);
  system.rhs_fe = assemble_rhs_fe(mesh, dofs, f);
  return system;
}

double energy_norm(const SparseMatrix& a_fe, const Vector& u) {
  const double q = u.dot(a_fe * u);
  if (q < -1e-12) {
    throw MatrixNotPsd("energy_norm: quadratic form is negative (" + std::to_string(q) + ")");
  }
  return std::sqrt(std::max(q, 0.0));
}

double broken_h1_seminorm(const TriMesh& mesh, const DofMap& dofs, const Vector& u,
                          const Partition* partition, int subdomain) {
  double sum = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    if (partition != nullptr && subdomain >= 0 && partition->triangle_subdomain[t] != subdomain) {
      continue;
    }
    const auto grads = cr_gradients(mesh.corners(t));
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    for (int i = 0; i < 3; ++i) {
      const int f = dofs.free_index[mesh.triangle_edges[t][i]];
      if (f >= 0) g += u[f] * grads[i];
    }
    sum += g.squaredNorm() * std::abs(mesh.signed_area(t));
  }
  return std::sqrt(sum);
}

double form_discrepancy(const SparseMatrix& a_fe, const SparseMatrix& b_fv, int trials,
                        std::uint64_t seed) {
  if (trials < 1) throw InvalidParameter("form_discrepancy: trials must be >= 1");
  constexpr int kSharpenSteps = 8;
  const int dim = static_cast<int>(a_fe.rows());
  const SparseMatrix diff = a_fe - b_fv;
  const SparseMatrix diff_t = diff.transpose();
  const Factorization energy =
      Factorization::compute(a_fe, Factorization::Kind::kSymmetricDefinite, "FE matrix");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto draw = [&] {
    Vector x(dim);
    for (int i = 0; i < dim; ++i) x[i] = normal(rng);
    return x;
  };

  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    Vector u = draw();
    Vector v = draw();
    auto measure = [&] {
      const double scale = energy_norm(a_fe, u) * energy_norm(a_fe, v);
      if (scale > 0.0) worst = std::max(worst, std::abs(v.dot(diff * u)) / scale);
    };
    measure();
    for (int step = 0; step < kSharpenSteps; ++step) {
      v = energy.solve(Vector(diff * u));
      measure();
      u = energy.solve(Vector(diff_t * v));
      measure();
    }
  }
  return worst;
}

}  // namespace crfve
