#pragma once

// The reduced space S: m cube points, the m x C(p,<=d) Walsh design matrix
// M[i][J] = w_J(theta_i), its Gram matrix, and the conditioning gate
//   sigma_min(M) >= sqrt(m) / (2 e^d).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "psyn/cube.hpp"
#include "psyn/linalg.hpp"

namespace psyn {

/// Column-major dense matrix with one column per low-degree Walsh function.
class DesignMatrix {
 public:
  DesignMatrix() = default;
  DesignMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[j * rows_ + i]; }
  double& operator()(std::size_t i, std::size_t j) { return a_[j * rows_ + i]; }
  std::span<const double> col(std::size_t j) const { return {a_.data() + j * rows_, rows_}; }
  std::span<double> col(std::size_t j) { return {a_.data() + j * rows_, rows_}; }

  /// out = M^T h   (length cols)
  void multiply_transpose(std::span<const double> h, std::span<double> out) const;
  /// out = M y     (length rows)
  void multiply(std::span<const double> y, std::span<double> out) const;
  /// M^T M
  SquareMatrix gram() const;

  friend bool operator==(const DesignMatrix&, const DesignMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

/// Walsh design matrix of `points` over all subsets of size <= d.
DesignMatrix build_design(const Dataset& points, std::size_t d);

/// sqrt(lambda_min(M^T M)) via the Jacobi eigensolver on the Gram matrix.
double smallest_singular_value(const DesignMatrix& m);

double conditioning_threshold(std::size_t m, std::size_t d);

struct ReducedSpace {
  Dataset slots;
  std::size_t degree = 0;
  DesignMatrix design;
  SquareMatrix gram;
  GramSolver solver;  // eigendecomposition of gram, reused by every projection
  double sigma_min = 0.0;
  std::uint64_t seed_used = 0;
  int attempts = 1;
  std::size_t duplicate_slots = 0;  // m minus the number of distinct slots

  std::size_t m() const { return slots.size(); }
  std::size_t p() const { return slots.dimension(); }
  std::size_t columns() const { return design.cols(); }
};

/// Build S from explicit slots (used for injected test spaces and audits).
ReducedSpace make_reduced_space(Dataset slots, std::size_t d, std::uint64_t seed_used = 0);

/// m i.i.d. uniform points drawn with Rng(seed).
/// Throws ConfigError when m < C(p,<=d) or the design exceeds the memory cap.
ReducedSpace draw_reduced_space(std::size_t p, std::size_t m, std::size_t d, std::uint64_t seed);

struct ConditioningVerdict {
  bool passed = false;
  double threshold = 0.0;
  double sigma_min = 0.0;
  int attempts = 0;
};

ConditioningVerdict check_conditioning(const ReducedSpace& rs);

/// Redraws S on failure. Attempt a uses derive_seed(seed, stream::conditioning_attempt(a)).
/// Throws ConditioningFailure after max_attempts failed draws.
ReducedSpace draw_until_conditioned(std::size_t p, std::size_t m, std::size_t d, std::uint64_t seed,
                                    int max_attempts = 16);

/// Validates (p, m, d) against C(p,<=d) and the design memory cap.
void validate_space_shape(std::size_t p, std::size_t m, std::size_t d);

}  // namespace psyn
