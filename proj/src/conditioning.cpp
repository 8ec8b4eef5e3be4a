#include "psyn/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "psyn/error.hpp"
#include "psyn/kernels.hpp"
#include "psyn/rng.hpp"

namespace psyn {
namespace {

constexpr std::size_t kMaxDesignEntries = std::size_t{1} << 27;

std::size_t count_duplicates(const Dataset& slots) {
  std::set<std::vector<Sign>> seen;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    auto r = slots.row(i);
    seen.emplace(r.begin(), r.end());
  }
  return slots.size() - seen.size();
}

}  // namespace

void DesignMatrix::multiply_transpose(std::span<const double> h, std::span<double> out) const {
  const auto& k = kernels::active();
  for (std::size_t j = 0; j < cols_; ++j) out[j] = k.dot(a_.data() + j * rows_, h.data(), rows_);
}

void DesignMatrix::multiply(std::span<const double> y, std::span<double> out) const {
  const auto& k = kernels::active();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t j = 0; j < cols_; ++j) k.axpy(y[j], a_.data() + j * rows_, out.data(), rows_);
}

SquareMatrix DesignMatrix::gram() const {
  const auto& k = kernels::active();
  SquareMatrix g(cols_);
  for (std::size_t i = 0; i < cols_; ++i) {
    for (std::size_t j = i; j < cols_; ++j) {
      const double v = k.dot(a_.data() + i * rows_, a_.data() + j * rows_, rows_);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

DesignMatrix build_design(const Dataset& points, std::size_t d) {
  const auto index = enumerate_low_degree(points.dimension(), d);
  DesignMatrix m(points.size(), index.size());
  for (std::size_t c = 0; c < index.size(); ++c) {
    auto col = m.col(c);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto r = points.row(i);
      int s = 1;
      for (std::uint32_t j : index[c].coords()) s *= r[j];
      col[i] = s;
    }
  }
  return m;
}

double smallest_singular_value(const DesignMatrix& m) {
  if (m.cols() == 0) throw ConfigError("design matrix has no columns");
  const auto eig = symmetric_eigen(m.gram());
  return std::sqrt(std::max(0.0, eig.values.front()));
}

double conditioning_threshold(std::size_t m, std::size_t d) {
  return std::sqrt(static_cast<double>(m)) / (2.0 * std::exp(static_cast<double>(d)));
}

void validate_space_shape(std::size_t p, std::size_t m, std::size_t d) {
  const std::size_t c = count_low_degree(p, d);
  if (m < c)
    throw ConfigError("m = " + std::to_string(m) + " is below C(p,<=d) = " + std::to_string(c) +
                      "; the design matrix cannot have full column rank");
  if (m > kMaxDesignEntries / c)
    throw ConfigError("design matrix of " + std::to_string(m) + " x " + std::to_string(c) +
                      " exceeds the memory cap");
}

ReducedSpace make_reduced_space(Dataset slots, std::size_t d, std::uint64_t seed_used) {
  validate_space_shape(slots.dimension(), slots.size(), d);
  DesignMatrix design = build_design(slots, d);
  SquareMatrix gram = design.gram();
  GramSolver solver(gram);
  const double sigma = std::sqrt(std::max(0.0, solver.min_eigenvalue()));
  const std::size_t dups = count_duplicates(slots);
  return ReducedSpace{std::move(slots), d,     std::move(design), std::move(gram), std::move(solver),
                      sigma,            seed_used, 1,             dups};
}

ReducedSpace draw_reduced_space(std::size_t p, std::size_t m, std::size_t d, std::uint64_t seed) {
  validate_space_shape(p, m, d);
  Rng rng(seed);
  Dataset slots(p);
  slots.reserve(m);
  std::vector<Sign> row(p);
  for (std::size_t i = 0; i < m; ++i) {
    for (auto& s : row) s = static_cast<Sign>(rng.sign());
    slots.push_back(row);
  }
  return make_reduced_space(std::move(slots), d, seed);
}

ConditioningVerdict check_conditioning(const ReducedSpace& rs) {
  const double threshold = conditioning_threshold(rs.m(), rs.degree);
  return {rs.sigma_min >= threshold, threshold, rs.sigma_min, rs.attempts};
}

ReducedSpace draw_until_conditioned(std::size_t p, std::size_t m, std::size_t d, std::uint64_t seed,
                                    int max_attempts) {
  if (max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
  validate_space_shape(p, m, d);
  double best_sigma = 0.0;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    ReducedSpace rs =
        draw_reduced_space(p, m, d, derive_seed(seed, stream::conditioning_attempt(attempt)));
    rs.attempts = attempt;
    if (check_conditioning(rs).passed) return rs;
    best_sigma = std::max(best_sigma, rs.sigma_min);
  }
  throw ConditioningFailure("Failure: reduced space not well conditioned after " +
                                std::to_string(max_attempts) + " attempts (best sigma_min " +
                                std::to_string(best_sigma) + ", threshold " +
                                std::to_string(conditioning_threshold(m, d)) + ")",
                            max_attempts);
}

}  // namespace psyn
