#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "psyn/error.hpp"
#include "psyn/linalg.hpp"
#include "psyn/rng.hpp"

using namespace psyn;

namespace {

SquareMatrix random_spd(std::size_t n, Rng& rng, std::size_t rank) {
  Eigen::MatrixXd b(n, rank);
  for (Eigen::Index i = 0; i < b.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) b(i, j) = rng.uniform(-1, 1);
  const Eigen::MatrixXd g = b * b.transpose();
  SquareMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return out;
}

}  // namespace

TEST(Jacobi, DiagonalInput) {
  SquareMatrix a(3);
  a(0, 0) = 3;
  a(1, 1) = -1;
  a(2, 2) = 2;
  const auto e = symmetric_eigen(a);
  EXPECT_EQ(e.values, (std::vector<double>{-1, 2, 3}));
}

TEST(Jacobi, MatchesEigenSelfAdjointSolver) {
  Rng rng(7);
  for (std::size_t n : {1U, 2U, 5U, 16U, 40U}) {
    const auto a = random_spd(n, rng, n);
    const auto e = symmetric_eigen(a);
    Eigen::MatrixXd ea(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) ea(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(ea);
    const double scale = ref.eigenvalues().cwiseAbs().maxCoeff();
    for (std::size_t k = 0; k < n; ++k)
      EXPECT_NEAR(e.values[k], ref.eigenvalues()(static_cast<Eigen::Index>(k)), 1e-12 * scale);
    // A v = lambda v
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        double av = 0.0;
        for (std::size_t j = 0; j < n; ++j) av += a(i, j) * e.vectors(j, k);
        EXPECT_NEAR(av, e.values[k] * e.vectors(i, k), 1e-11 * scale);
      }
    }
  }
}

TEST(GramSolverTest, SolvesFullRankSystem) {
  Rng rng(9);
  const auto g = random_spd(12, rng, 12);
  GramSolver s(g);
  EXPECT_TRUE(s.full_rank());
  std::vector<double> x(12), r(12, 0.0), y(12);
  for (auto& v : x) v = rng.uniform(-1, 1);
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 12; ++j) r[i] += g(i, j) * x[j];
  s.solve(r, y);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(y[i], x[i], 1e-8);
}

TEST(GramSolverTest, RankDeficientUsesPseudoInverse) {
  Rng rng(10);
  const auto g = random_spd(6, rng, 3);
  GramSolver s(g);
  EXPECT_FALSE(s.full_rank());
  EXPECT_EQ(s.rank(), 3U);
  // r in the range of G: G y = r must hold.
  std::vector<double> x(6), r(6, 0.0), y(6);
  for (auto& v : x) v = rng.uniform(-1, 1);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) r[i] += g(i, j) * x[j];
  s.solve(r, y);
  for (std::size_t i = 0; i < 6; ++i) {
    double gy = 0.0;
    for (std::size_t j = 0; j < 6; ++j) gy += g(i, j) * y[j];
    EXPECT_NEAR(gy, r[i], 1e-10);
  }
}
