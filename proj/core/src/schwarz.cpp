#include "crfve/schwarz.hpp"

#include <algorithm>

#include "crfve/errors.hpp"

namespace crfve {

std::string to_string(Variant variant) {
  return variant == Variant::kSymmetric ? "sym" : "nsym";
}

Variant parse_variant(const std::string& name) {
  if (name == "sym") return Variant::kSymmetric;
  if (name == "nsym") return Variant::kNonsymmetric;
  throw InvalidParameter("unknown variant '" + name + "' (expected sym or nsym)");
}

namespace {

std::vector<int> to_free(const std::vector<int>& edges, const DofMap& dofs) {
  std::vector<int> out;
  out.reserve(edges.size());
  for (int e : edges) {
    if (dofs.is_free(e)) out.push_back(dofs.free_index[e]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Vector gather(const Vector& x, const std::vector<int>& idx) {
  Vector out(static_cast<int>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<int>(i)] = x[idx[i]];
  return out;
}

void scatter_add(const Vector& local, const std::vector<int>& idx, Vector& out) {
  for (std::size_t i = 0; i < idx.size(); ++i) out[idx[i]] += local[static_cast<int>(i)];
}

std::string subdomain_label(int k) { return "subdomain " + std::to_string(k); }

std::string edge_label(int k, int l) {
  return "edge (" + std::to_string(k) + "," + std::to_string(l) + ")";
}

}  // namespace

HarmonicExtension::HarmonicExtension(const SparseMatrix& a_fe, const Partition& partition,
                                     const DofMap& dofs) {
  const int count = partition.subdomain_count();
  interior_.resize(count);
  boundary_.resize(count);
  factors_.resize(count);
  coupling_.resize(count);
  for (int k = 0; k < count; ++k) {
    interior_[k] = to_free(partition.interior_dofs[k], dofs);
    boundary_[k] = to_free(partition.boundary_dofs[k], dofs);
    factors_[k] = Factorization::compute(extract_block(a_fe, interior_[k], interior_[k]),
                                         Factorization::Kind::kSymmetricDefinite,
                                         subdomain_label(k), interior_[k]);
    coupling_[k] = extract_block(a_fe, interior_[k], boundary_[k]);
  }
}

Vector HarmonicExtension::extend(int k, const Vector& boundary_values) const {
  if (boundary_values.size() != static_cast<Eigen::Index>(boundary_[k].size())) {
    throw InvalidParameter("harmonic extension: expected " + std::to_string(boundary_[k].size()) +
                           " boundary values");
  }
  const Vector interior = factors_[k].solve(Vector(-(coupling_[k] * boundary_values)));
  Vector out(interior.size() + boundary_values.size());
  out << interior, boundary_values;
  return out;
}

DenseMatrix HarmonicExtension::extend_interior(int k, const std::vector<int>& nodes,
                                               const DenseMatrix& values) const {
  // Expand the node-restricted data to all of boundary(k), zero elsewhere.
  DenseMatrix full = DenseMatrix::Zero(static_cast<int>(boundary_[k].size()), values.cols());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto it = std::lower_bound(boundary_[k].begin(), boundary_[k].end(), nodes[i]);
    if (it == boundary_[k].end() || *it != nodes[i]) {
      throw InvalidParameter("harmonic extension: node is not on the boundary of " +
                             subdomain_label(k));
    }
    full.row(static_cast<int>(it - boundary_[k].begin())) = values.row(static_cast<int>(i));
  }
  const DenseMatrix rhs = -(coupling_[k] * full);
  return factors_[k].solve(rhs);
}

EdgeBasis build_edge_basis(const Partition& partition, const DofMap& dofs,
                           const HarmonicExtension& harmonic) {
  EdgeBasis basis;
  std::vector<Triplet> theta;
  for (int kl = 0; kl < partition.interface_count(); ++kl) {
    const Interface& face = partition.interfaces[kl];
    EdgeSpace space;
    space.first = face.first;
    space.second = face.second;
    space.nodes = to_free(face.dofs, dofs);
    const int width = static_cast<int>(space.nodes.size());
    const auto& in_k = harmonic.interior(face.first);
    const auto& in_l = harmonic.interior(face.second);

    space.support = space.nodes;
    space.support.insert(space.support.end(), in_k.begin(), in_k.end());
    space.support.insert(space.support.end(), in_l.begin(), in_l.end());

    const DenseMatrix unit = DenseMatrix::Identity(width, width);
    space.basis.resize(static_cast<int>(space.support.size()), width);
    space.basis.topRows(width) = unit;
    space.basis.middleRows(width, static_cast<int>(in_k.size())) =
        harmonic.extend_interior(face.first, space.nodes, unit);
    space.basis.bottomRows(static_cast<int>(in_l.size())) =
        harmonic.extend_interior(face.second, space.nodes, unit);

    const Vector column = space.basis.rowwise().sum();
    for (std::size_t i = 0; i < space.support.size(); ++i) {
      const double v = column[static_cast<int>(i)];
      if (v != 0.0) theta.emplace_back(space.support[i], kl, v);
    }
    basis.spaces.push_back(std::move(space));
  }
  basis.theta.resize(dofs.free_count(), partition.interface_count());
  basis.theta.setFromTriplets(theta.begin(), theta.end());
  return basis;
}

EdgeBasis build_edge_basis(const Partition& partition, const DofMap& dofs,
                           const SparseMatrix& a_fe) {
  return build_edge_basis(partition, dofs, HarmonicExtension(a_fe, partition, dofs));
}

SchwarzPreconditioner::SchwarzPreconditioner(Variant variant, const SparseMatrix& a_fe,
                                             const SparseMatrix& b_fv, const Partition& partition,
                                             const DofMap& dofs)
    : variant_(variant), b_fv_(b_fv), harmonic_(a_fe, partition, dofs) {}

SchwarzPreconditioner SchwarzPreconditioner::setup(Variant variant, const SparseMatrix& a_fe,
                                                   const SparseMatrix& b_fv,
                                                   const Partition& partition,
                                                   const DofMap& dofs) {
  if (a_fe.rows() != dofs.free_count() || b_fv.rows() != dofs.free_count()) {
    throw InvalidParameter("schwarz setup: matrices must be assembled on free dofs");
  }
  SchwarzPreconditioner p(variant, a_fe, b_fv, partition, dofs);
  const SparseMatrix& m = variant == Variant::kSymmetric ? a_fe : b_fv;
  const auto kind = variant == Variant::kSymmetric ? Factorization::Kind::kSymmetricDefinite
                                                   : Factorization::Kind::kGeneral;
  try {
    p.edges_ = build_edge_basis(partition, dofs, p.harmonic_);

    for (const EdgeSpace& space : p.edges_.spaces) {
      const SparseMatrix local = extract_block(m, space.support, space.support);
      DenseMatrix s = space.basis.transpose() * (local * space.basis);
      if (variant == Variant::kSymmetric) s = 0.5 * (s + s.transpose()).eval();
      p.edge_factors_.push_back(Factorization::compute(s, kind, edge_label(space.first, space.second),
                                                       space.nodes));
      p.edge_matrices_.push_back(std::move(s));
    }

    const SparseMatrix& theta = p.edges_.theta;
    p.coarse_matrix_ = SparseMatrix(theta.transpose() * (m * theta));
    if (variant == Variant::kSymmetric) {
      p.coarse_matrix_ = SparseMatrix(0.5 * (p.coarse_matrix_ + SparseMatrix(p.coarse_matrix_.transpose())));
    }
    p.coarse_matrix_.prune(0.0);
    p.coarse_factor_ = Factorization::compute(p.coarse_matrix_, kind, "coarse space");

    if (variant == Variant::kNonsymmetric) {
      for (int k = 0; k < partition.subdomain_count(); ++k) {
        const auto& interior = p.harmonic_.interior(k);
        p.subdomain_factors_.push_back(Factorization::compute(
            extract_block(m, interior, interior), kind, subdomain_label(k), interior));
      }
    }
  } catch (const FactorizationFailure& e) {
    throw SetupFailure(std::string("schwarz setup (") + to_string(variant) + "): " + e.what());
  }
  return p;
}

void SchwarzPreconditioner::add_coarse(const Vector& w, Vector& out) const {
  const SparseMatrix& theta = edges_.theta;
  if (theta.cols() == 0) return;
  const Vector t = coarse_factor_.solve(Vector(theta.transpose() * w));
  out += theta * t;
}

void SchwarzPreconditioner::add_edge(int kl, const Vector& w, Vector& out) const {
  const EdgeSpace& space = edges_.spaces[kl];
  if (space.nodes.empty()) return;
  const Vector local = space.basis.transpose() * gather(w, space.support);
  const Vector t = edge_factors_[kl].solve(local);
  scatter_add(space.basis * t, space.support, out);
}

void SchwarzPreconditioner::add_subdomain(int k, const Vector& w, Vector& out) const {
  const auto& interior = harmonic_.interior(k);
  if (interior.empty()) return;
  const Factorization& f =
      variant_ == Variant::kSymmetric ? harmonic_.interior_factor(k) : subdomain_factors_[k];
  scatter_add(f.solve(gather(w, interior)), interior, out);
}

Vector SchwarzPreconditioner::correct(const Vector& w) const {
  Vector out = Vector::Zero(w.size());
  add_coarse(w, out);
  for (int kl = 0; kl < static_cast<int>(edges_.spaces.size()); ++kl) add_edge(kl, w, out);
  for (int k = 0; k < harmonic_.subdomain_count(); ++k) add_subdomain(k, w, out);
  return out;
}

Vector SchwarzPreconditioner::apply(const Vector& u) const { return correct(b_fv_ * u); }

Vector SchwarzPreconditioner::rhs(const Vector& b_fv) const { return correct(b_fv); }

int SchwarzPreconditioner::component_count() const {
  return 1 + static_cast<int>(edges_.spaces.size()) + harmonic_.subdomain_count();
}

std::string SchwarzPreconditioner::component_name(int i) const {
  if (i == 0) return "coarse space";
  const int edges = static_cast<int>(edges_.spaces.size());
  if (i <= edges) return edge_label(edges_.spaces[i - 1].first, edges_.spaces[i - 1].second);
  return subdomain_label(i - 1 - edges);
}

Vector SchwarzPreconditioner::apply_component(int i, const Vector& u) const {
  const Vector w = b_fv_ * u;
  Vector out = Vector::Zero(w.size());
  const int edges = static_cast<int>(edges_.spaces.size());
  if (i == 0) {
    add_coarse(w, out);
  } else if (i <= edges) {
    add_edge(i - 1, w, out);
  } else {
    add_subdomain(i - 1 - edges, w, out);
  }
  return out;
}

DenseMatrix SchwarzPreconditioner::component_basis(int i) const {
  const int edges = static_cast<int>(edges_.spaces.size());
  if (i == 0) return DenseMatrix(edges_.theta);
  if (i <= edges) {
    const EdgeSpace& space = edges_.spaces[i - 1];
    DenseMatrix out = DenseMatrix::Zero(dim(), space.basis.cols());
    for (std::size_t r = 0; r < space.support.size(); ++r) {
      out.row(space.support[r]) = space.basis.row(static_cast<int>(r));
    }
    return out;
  }
  const auto& interior = harmonic_.interior(i - 1 - edges);
  DenseMatrix out = DenseMatrix::Zero(dim(), static_cast<int>(interior.size()));
  for (std::size_t c = 0; c < interior.size(); ++c) out(interior[c], static_cast<int>(c)) = 1.0;
  return out;
}

SchwarzSolution solve(const SchwarzPreconditioner& precond, const SparseMatrix& a_fe,
                      const Vector& b_fv, const GmresOptions& options) {
  const Vector g = precond.rhs(b_fv);
  const LinearOperator op = [&precond](const Vector& x, Vector& y) { y = precond.apply(x); };
  GmresOptions opts = options;
  if (!opts.monitor) {
    const SparseMatrix* fv = &precond.fv();
    const double b_norm = b_fv.norm();
    opts.monitor = [fv, &b_fv, b_norm](const Vector& u) {
      return b_norm == 0.0 ? 0.0 : (b_fv - *fv * u).norm() / b_norm;
    };
  }
  SchwarzSolution out;
  out.gmres = gmres(op, g, InnerProduct(a_fe), opts);
  out.solution = out.gmres.solution;
  return out;
}

}  // namespace crfve
