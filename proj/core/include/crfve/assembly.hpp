#ifndef CRFVE_ASSEMBLY_HPP_
#define CRFVE_ASSEMBLY_HPP_

#include <array>
#include <cstdint>
#include <functional>

#include <Eigen/Core>

#include "crfve/coefficient.hpp"
#include "crfve/linalg.hpp"
#include "crfve/mesh.hpp"

namespace crfve {

using Source = std::function<double(Point)>;

enum class BoundaryTreatment {
  kEliminate,  // square matrices on free dofs
  kKeep,       // all edges; FV rows for boundary control volumes included
};

// Gradients of the CR basis functions phi_i = 1 - 2 lambda_i on a triangle.
// Throws SingularGeometry for degenerate triangles.
std::array<Eigen::Vector2d, 3> cr_gradients(const std::array<Point, 3>& corners);

// K_ij = int_tau A grad(phi_i) . grad(phi_j), edge-midpoint quadrature.
// `coeff[q]` is the tensor at the midpoint of local edge q.
Eigen::Matrix3d local_cr_stiffness(const std::array<Point, 3>& corners,
                                   const std::array<Tensor2, 3>& coeff);

// Symmetric CR finite element matrix a_h(u, v).
SparseMatrix assemble_fe(const TriMesh& mesh, const DofMap& dofs, const Partition& partition,
                         const CoefficientField& coeff,
                         BoundaryTreatment bc = BoundaryTreatment::kEliminate);

// Finite volume element matrix: row e is the test control volume b_e, column m
// the CR trial function; entry = -int_{boundary b_e} A grad(phi_m) . n ds with
// A sampled at segment midpoints.
SparseMatrix assemble_fv(const TriMesh& mesh, const DualMesh& dual, const DofMap& dofs,
                         const Partition& partition, const CoefficientField& coeff,
                         BoundaryTreatment bc = BoundaryTreatment::kEliminate);

// Entries int_{b_e} f dx on free dofs (all dofs with kKeep).
Vector assemble_rhs_fv(const TriMesh& mesh, const DofMap& dofs, const Source& f,
                       BoundaryTreatment bc = BoundaryTreatment::kEliminate);

// Entries int f phi_m dx with the edge-midpoint rule.
Vector assemble_rhs_fe(const TriMesh& mesh, const DofMap& dofs, const Source& f,
                       BoundaryTreatment bc = BoundaryTreatment::kEliminate);

struct AssembledSystem {
  SparseMatrix fe;  // symmetric, positive definite on free dofs
  SparseMatrix fv;  // nonsymmetric in general
  Vector rhs_fv;
  Vector rhs_fe;
};

AssembledSystem assemble_system(const TriMesh& mesh, const DualMesh& dual, const DofMap& dofs,
                                const Partition& partition, const CoefficientField& coeff,
                                const Source& f);

// sqrt(u^T A u); throws MatrixNotPsd when the quadratic form is below -1e-12.
double energy_norm(const SparseMatrix& a_fe, const Vector& u);

// sqrt(sum_tau |grad u|^2 |tau|) for a free-dof vector u. When `subdomain` is
// given, only that subdomain's triangles contribute.
double broken_h1_seminorm(const TriMesh& mesh, const DofMap& dofs, const Vector& u,
                          const Partition* partition = nullptr, int subdomain = -1);

// max over probe pairs (u, v) of |v^T (A_FE - B_FV) u| / (|u|_a |v|_a).
// Each trial draws a random Gaussian pair and then sharpens it with a few
// alternating maximization steps (v <- A^-1 D u, u <- A^-1 D^T v); every pair
// visited counts. Deterministic for a given seed.
double form_discrepancy(const SparseMatrix& a_fe, const SparseMatrix& b_fv, int trials,
                        std::uint64_t seed);

}  // namespace crfve

#endif  // CRFVE_ASSEMBLY_HPP_
