#include "crfve/linalg.hpp"

#include <cmath>
#include <ostream>
#include <variant>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "crfve/errors.hpp"

namespace crfve {

SparseMatrix extract_block(const SparseMatrix& matrix, std::span<const int> rows,
                           std::span<const int> cols) {
  std::vector<int> col_pos(matrix.cols(), -1);
  for (std::size_t j = 0; j < cols.size(); ++j) col_pos[cols[j]] = static_cast<int>(j);
  std::vector<Triplet> triplets;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (SparseMatrix::InnerIterator it(matrix, rows[i]); it; ++it) {
      const int j = col_pos[it.col()];
      if (j >= 0) triplets.emplace_back(static_cast<int>(i), j, it.value());
    }
  }
  SparseMatrix block(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  block.setFromTriplets(triplets.begin(), triplets.end());
  return block;
}

DenseMatrix dense_operator_matrix(const LinearOperator& op, int dim) {
  if (dim > 5000) {
    throw InvalidParameter("dense_operator_matrix: dimension " + std::to_string(dim) +
                           " exceeds the 5000 limit");
  }
  DenseMatrix dense(dim, dim);
  Vector unit = Vector::Zero(dim);
  Vector column(dim);
  for (int j = 0; j < dim; ++j) {
    unit[j] = 1.0;
    op(unit, column);
    dense.col(j) = column;
    unit[j] = 0.0;
  }
  return dense;
}

double max_asymmetry(const SparseMatrix& matrix) {
  const SparseMatrix transposed = matrix.transpose();
  const SparseMatrix diff = matrix - transposed;
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

void write_coordinate(std::ostream& out, const SparseMatrix& matrix) {
  const auto precision = out.precision(17);
  for (int k = 0; k < matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix, k); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
  out.precision(precision);
}

struct Factorization::Impl {
  using ColMajorSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
  std::variant<Eigen::LLT<DenseMatrix>, Eigen::PartialPivLU<DenseMatrix>,
               Eigen::SimplicialLLT<ColMajorSparse>, Eigen::SparseLU<ColMajorSparse>>
      solver;

  template <typename Solver>
  explicit Impl(std::in_place_type_t<Solver> tag) : solver(tag) {}
};

Factorization::Factorization() = default;
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;
Factorization::~Factorization() = default;

namespace {

void check_square(Eigen::Index rows, Eigen::Index cols, const std::string& label) {
  if (rows != cols) {
    throw InvalidParameter("factorization of " + label + ": block is not square");
  }
}

// Partial pivoting succeeds on singular input; reject tiny pivots instead.
void check_pivots(const Eigen::PartialPivLU<DenseMatrix>& lu, const std::string& label) {
  const auto diag = lu.matrixLU().diagonal().cwiseAbs();
  if (diag.size() == 0) return;
  const double scale = lu.matrixLU().cwiseAbs().maxCoeff();
  if (!(diag.minCoeff() > 1e-13 * scale)) {
    throw FactorizationFailure("factorization of " + label + " failed: matrix is singular");
  }
}

}  // namespace

Factorization Factorization::compute(const DenseMatrix& block, Kind kind, std::string label,
                                     std::vector<int> dofs) {
  check_square(block.rows(), block.cols(), label);
  Factorization f;
  f.size_ = static_cast<int>(block.rows());
  f.kind_ = kind;
  f.dofs_ = std::move(dofs);
  f.label_ = std::move(label);
  if (kind == Kind::kSymmetricDefinite) {
    f.impl_ = std::make_unique<Impl>(std::in_place_type<Eigen::LLT<DenseMatrix>>);
    auto& llt = std::get<Eigen::LLT<DenseMatrix>>(f.impl_->solver);
    llt.compute(block);
    if (llt.info() != Eigen::Success) {
      throw FactorizationFailure("Cholesky factorization of " + f.label_ +
                                 " failed: block is not positive definite");
    }
  } else {
    f.impl_ = std::make_unique<Impl>(std::in_place_type<Eigen::PartialPivLU<DenseMatrix>>);
    auto& lu = std::get<Eigen::PartialPivLU<DenseMatrix>>(f.impl_->solver);
    lu.compute(block);
    check_pivots(lu, f.label_);
  }
  return f;
}

Factorization Factorization::compute(const SparseMatrix& block, Kind kind, std::string label,
                                     std::vector<int> dofs) {
  check_square(block.rows(), block.cols(), label);
  if (block.rows() < kDenseLimit) {
    return compute(DenseMatrix(block), kind, std::move(label), std::move(dofs));
  }
  Factorization f;
  f.size_ = static_cast<int>(block.rows());
  f.kind_ = kind;
  f.dofs_ = std::move(dofs);
  f.label_ = std::move(label);
  const Impl::ColMajorSparse colmajor = block;
  if (kind == Kind::kSymmetricDefinite) {
    using Solver = Eigen::SimplicialLLT<Impl::ColMajorSparse>;
    f.impl_ = std::make_unique<Impl>(std::in_place_type<Solver>);
    auto& llt = std::get<Solver>(f.impl_->solver);
    llt.compute(colmajor);
    if (llt.info() != Eigen::Success) {
      throw FactorizationFailure("sparse Cholesky factorization of " + f.label_ +
                                 " failed: block is not positive definite");
    }
  } else {
    using Solver = Eigen::SparseLU<Impl::ColMajorSparse>;
    f.impl_ = std::make_unique<Impl>(std::in_place_type<Solver>);
    auto& lu = std::get<Solver>(f.impl_->solver);
    lu.analyzePattern(colmajor);
    lu.factorize(colmajor);
    if (lu.info() != Eigen::Success) {
      throw FactorizationFailure("sparse LU factorization of " + f.label_ + " failed: " +
                                 lu.lastErrorMessage());
    }
  }
  return f;
}

Vector Factorization::solve(const Vector& rhs) const {
  if (size_ == 0) return Vector();
  return std::visit([&](const auto& solver) -> Vector { return solver.solve(rhs); },
                    impl_->solver);
}

DenseMatrix Factorization::solve(const DenseMatrix& rhs) const {
  if (size_ == 0) return DenseMatrix(0, rhs.cols());
  return std::visit([&](const auto& solver) -> DenseMatrix { return solver.solve(rhs); },
                    impl_->solver);
}

}  // namespace crfve
