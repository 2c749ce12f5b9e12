#ifndef CRFVE_LINALG_HPP_
#define CRFVE_LINALG_HPP_

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace crfve {

// Compressed row storage; Eigen keeps column indices sorted and unique per
// row once compressed.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using Triplet = Eigen::Triplet<double, int>;

// y = Op(x). Implementations must be deterministic.
using LinearOperator = std::function<void(const Vector& x, Vector& y)>;

SparseMatrix extract_block(const SparseMatrix& matrix, std::span<const int> rows,
                           std::span<const int> cols);

// Columns are op(e_j). Refuses dim > 5000.
DenseMatrix dense_operator_matrix(const LinearOperator& op, int dim);

double max_asymmetry(const SparseMatrix& matrix);

// `row col value` per line, zero-based.
void write_coordinate(std::ostream& out, const SparseMatrix& matrix);

// Direct solver for a square sub-block. Blocks below kDenseLimit rows use
// dense factorizations; larger blocks go through sparse-direct solvers.
class Factorization {
 public:
  enum class Kind { kSymmetricDefinite, kGeneral };
  static constexpr int kDenseLimit = 200;

  // `label` names the block in error messages ("subdomain 3", "edge (1,2)").
  static Factorization compute(const SparseMatrix& block, Kind kind, std::string label,
                               std::vector<int> dofs = {});
  static Factorization compute(const DenseMatrix& block, Kind kind, std::string label,
                               std::vector<int> dofs = {});

  Factorization();
  Factorization(Factorization&&) noexcept;
  Factorization& operator=(Factorization&&) noexcept;
  ~Factorization();

  Vector solve(const Vector& rhs) const;
  DenseMatrix solve(const DenseMatrix& rhs) const;

  int size() const { return size_; }
  Kind kind() const { return kind_; }
  const std::vector<int>& dofs() const { return dofs_; }
  const std::string& label() const { return label_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int size_ = 0;
  Kind kind_ = Kind::kGeneral;
  std::vector<int> dofs_;
  std::string label_;
};

}  // namespace crfve

#endif  // CRFVE_LINALG_HPP_
