#include "psyn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "psyn/error.hpp"

namespace psyn {

EigenDecomposition symmetric_eigen(const SquareMatrix& input, double rel_tol, int max_sweeps) {
  const std::size_t n = input.size();
  SquareMatrix a = input;
  SquareMatrix v(n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  double frob2 = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) frob2 += a(i, j) * a(i, j);
  const double target = rel_tol * std::sqrt(frob2);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  EigenDecomposition out;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (off_norm() <= target) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // rotation angle that annihilates a(p,q)
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == max_sweeps && off_norm() > target)
    throw NumericError("Jacobi eigensolver did not converge in " + std::to_string(max_sweeps) +
                       " sweeps (off-diagonal norm " + std::to_string(off_norm()) + ", target " +
                       std::to_string(target) + ", n=" + std::to_string(n) + ")");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  out.values.resize(n);
  out.vectors = SquareMatrix(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  out.sweeps = sweep;
  return out;
}

GramSolver::GramSolver(const SquareMatrix& gram) : eig_(symmetric_eigen(gram)) {
  const std::size_t n = eig_.values.size();
  const double cutoff = 1e-12 * static_cast<double>(std::max<std::size_t>(n, 1)) *
                        std::max(std::abs(max_eigenvalue()), 1e-300);
  inv_values_.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (eig_.values[k] > cutoff) {
      inv_values_[k] = 1.0 / eig_.values[k];
      ++rank_;
    }
  }
}

void GramSolver::solve(std::span<const double> r, std::span<double> y) const {
  const std::size_t n = size();
  const SquareMatrix& v = eig_.vectors;
  std::vector<double> coef(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (inv_values_[k] == 0.0) continue;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v(i, k) * r[i];
    coef[k] = s * inv_values_[k];
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += v(i, k) * coef[k];
    y[i] = s;
  }
}

}  // namespace psyn
