#ifndef CRFVE_SCHWARZ_HPP_
#define CRFVE_SCHWARZ_HPP_

#include <string>
#include <vector>

#include "crfve/gmres.hpp"
#include "crfve/linalg.hpp"
#include "crfve/mesh.hpp"

namespace crfve {

enum class Variant {
  kSymmetric,     // subspace problems use the FE form
  kNonsymmetric,  // subspace problems use the FV form
};

std::string to_string(Variant variant);
Variant parse_variant(const std::string& name);

// Local discrete harmonic extension with respect to the FE form. All indices
// are free-dof positions. The boundary of a subdomain is its set of interface
// nodes; outer-boundary nodes are Dirichlet and carry zero.
class HarmonicExtension {
 public:
  HarmonicExtension(const SparseMatrix& a_fe, const Partition& partition, const DofMap& dofs);

  int subdomain_count() const { return static_cast<int>(interior_.size()); }
  const std::vector<int>& interior(int k) const { return interior_[k]; }
  const std::vector<int>& boundary(int k) const { return boundary_[k]; }
  const Factorization& interior_factor(int k) const { return factors_[k]; }

  // Values on interior(k) followed by boundary(k).
  Vector extend(int k, const Vector& boundary_values) const;

  // Interior values for several boundary data columns on the given boundary
  // nodes (a subset of boundary(k)).
  DenseMatrix extend_interior(int k, const std::vector<int>& nodes,
                              const DenseMatrix& values) const;

 private:
  std::vector<std::vector<int>> interior_;
  std::vector<std::vector<int>> boundary_;
  std::vector<Factorization> factors_;
  std::vector<SparseMatrix> coupling_;  // A_FE(interior(k), boundary(k))
};

// Subspace V_kl: discrete harmonic functions that vanish at every interface
// node off Gamma_kl. One basis column per node of Gamma_kl.
struct EdgeSpace {
  int first = -1;
  int second = -1;
  std::vector<int> nodes;    // Gamma_kl nodes (free-dof positions)
  std::vector<int> support;  // nodes, then interior of first, then interior of second
  DenseMatrix basis;         // support.size() x nodes.size()
};

struct EdgeBasis {
  // Coarse basis: column kl is the edge function theta_kl on all free dofs.
  SparseMatrix theta;
  std::vector<EdgeSpace> spaces;  // one per interface, same order as Partition
};

EdgeBasis build_edge_basis(const Partition& partition, const DofMap& dofs,
                           const HarmonicExtension& harmonic);
EdgeBasis build_edge_basis(const Partition& partition, const DofMap& dofs,
                           const SparseMatrix& a_fe);

// Additive Schwarz operator T = T_0 + sum T_kl + sum T_k built on the edge
// decomposition V_h = V_0 + sum V_kl + sum V_k. Each T_i u solves the subspace
// problem M(T_i u, v) = a^FV(u, v) for v in V_i, where M is the FE form for the
// symmetric variant and the FV form for the nonsymmetric one.
class SchwarzPreconditioner {
 public:
  // Throws SetupFailure naming the subspace when a subspace matrix is singular.
  static SchwarzPreconditioner setup(Variant variant, const SparseMatrix& a_fe,
                                     const SparseMatrix& b_fv, const Partition& partition,
                                     const DofMap& dofs);

  Variant variant() const { return variant_; }
  int dim() const { return static_cast<int>(b_fv_.rows()); }
  const SparseMatrix& fv() const { return b_fv_; }

  // T u.
  Vector apply(const Vector& u) const;
  // g = sum_i Phi_i M_i^{-1} Phi_i^T b, equal to T applied to the FV solution.
  Vector rhs(const Vector& b_fv) const;
  // Sum of subspace corrections of a residual-form vector w (T u = correct(B u)).
  Vector correct(const Vector& w) const;

  // Components in accumulation order: coarse, edges by (k, l), subdomains by index.
  int component_count() const;
  std::string component_name(int i) const;
  Vector apply_component(int i, const Vector& u) const;
  // Basis of V_i as dense columns over all free dofs (test helper).
  DenseMatrix component_basis(int i) const;

  const EdgeBasis& edge_basis() const { return edges_; }
  const SparseMatrix& coarse_matrix() const { return coarse_matrix_; }
  const DenseMatrix& edge_matrix(int interface) const { return edge_matrices_[interface]; }
  const HarmonicExtension& harmonic() const { return harmonic_; }

 private:
  SchwarzPreconditioner(Variant variant, const SparseMatrix& a_fe, const SparseMatrix& b_fv,
                        const Partition& partition, const DofMap& dofs);

  void add_coarse(const Vector& w, Vector& out) const;
  void add_edge(int kl, const Vector& w, Vector& out) const;
  void add_subdomain(int k, const Vector& w, Vector& out) const;

  Variant variant_;
  SparseMatrix b_fv_;
  HarmonicExtension harmonic_;
  EdgeBasis edges_;
  SparseMatrix coarse_matrix_;
  Factorization coarse_factor_;
  std::vector<DenseMatrix> edge_matrices_;
  std::vector<Factorization> edge_factors_;
  std::vector<Factorization> subdomain_factors_;  // nonsymmetric variant only
};

struct SchwarzSolution {
  Vector solution;
  GmresResult gmres;
};

// GMRES on T u = g in the FE energy inner product. Unless the caller supplies
// a monitor, the monitor is ||b - B u||_2 / ||b||_2, the residual of the
// unpreconditioned FV system, used when options.stopping is kMonitor.
SchwarzSolution solve(const SchwarzPreconditioner& precond, const SparseMatrix& a_fe,
                      const Vector& b_fv, const GmresOptions& options = {});

}  // namespace crfve

#endif  // CRFVE_SCHWARZ_HPP_
