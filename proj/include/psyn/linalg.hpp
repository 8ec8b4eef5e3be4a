#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace psyn {

/// Dense square matrix, row-major.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {a_.data() + i * n_, n_}; }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  SquareMatrix vectors;        // column k is the eigenvector of values[k]
  int sweeps = 0;
};

/// Cyclic Jacobi rotations on a symmetric matrix. Stops when the off-diagonal
/// Frobenius norm drops below `rel_tol` times the Frobenius norm of the input.
/// Throws NumericError if `max_sweeps` is exhausted.
EigenDecomposition symmetric_eigen(const SquareMatrix& a, double rel_tol = 1e-15,
                                   int max_sweeps = 100);

/// Solves G y = r through a cached eigendecomposition of a symmetric positive
/// semidefinite G. Eigenvalues below the rank cutoff are dropped, which turns
/// solve() into the pseudo-inverse on rank-deficient input.
class GramSolver {
 public:
  explicit GramSolver(const SquareMatrix& gram);

  std::size_t size() const { return eig_.values.size(); }
  std::size_t rank() const { return rank_; }
  bool full_rank() const { return rank_ == size(); }
  double min_eigenvalue() const { return eig_.values.empty() ? 0.0 : eig_.values.front(); }
  double max_eigenvalue() const { return eig_.values.empty() ? 0.0 : eig_.values.back(); }
  const EigenDecomposition& eigen() const { return eig_; }

  void solve(std::span<const double> r, std::span<double> y) const;

 private:
  EigenDecomposition eig_;
  std::vector<double> inv_values_;
  std::size_t rank_ = 0;
};

}  // namespace psyn
