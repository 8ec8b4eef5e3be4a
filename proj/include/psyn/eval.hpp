#pragma once

// Accuracy measurement, constructive marginal matching, and calibration
// formulas.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "psyn/conditioning.hpp"
#include "psyn/cube.hpp"
#include "psyn/solver.hpp"

namespace psyn {

struct QueryError {
  MarginalQuery query;
  double error = 0.0;
};

struct AccuracyReport {
  std::vector<QueryError> per_query;
  double max_error = 0.0;
  double mean_error = 0.0;
  std::size_t degree = 0;
};

/// Compares every marginal of dimension <= d of `x` and `y`.
/// Throws ConfigError when the query count exceeds max_queries.
AccuracyReport accuracy_report(const Dataset& x, const Dataset& y, std::size_t d,
                               std::size_t max_queries = 1'000'000);

/// The same comparison for a weighted density on S against x.
AccuracyReport density_accuracy(const Dataset& x, const ReducedSpace& space,
                                std::span<const double> weights, std::size_t max_queries = 1'000'000);

enum class MatchOutcome { kWitness, kNoWitness };

struct MatchResult {
  MatchOutcome outcome = MatchOutcome::kNoWitness;
  std::string reason;       // why no witness was found
  SlotDensity density;      // valid when outcome == kWitness
  double feasibility_gap = 0.0;
};

/// Nonnegative weights h on S with M^T h = target, the point nearest to
/// uniform-on-S. Stagnation is reported as "no witness found", never as a
/// proof of infeasibility.
MatchResult exact_match_target(std::shared_ptr<const ReducedSpace> space, std::vector<double> target,
                               const SolverOptions& opt = {});

/// exact_match_target with the degree-<=d Fourier data of x.
MatchResult exact_match(const Dataset& x, std::shared_ptr<const ReducedSpace> space,
                        const SolverOptions& opt = {});

struct CalibrationParams {
  double gamma = 0.5;   // failure budget, in (0,1)
  double alpha = 1.0;   // lower regularity of the sampling density, in (0,1]
  double kappa = 1.0;   // bound on ||f/g||_{L2}, >= 1
  double delta = 0.05;  // accuracy target

  void validate() const;
};

/// ceil(16 gamma^-2 e^{2d} C(p,<=d)): S passes the gate with probability >= 1 - gamma.
std::uint64_t recommend_m(std::size_t p, std::size_t d, const CalibrationParams& cal);
/// ceil(16 (alpha delta)^-2 gamma^-1 kappa^2 e^{2d} C(p,<=d)): sample size for exact matching.
std::uint64_t recommend_m_matching(std::size_t p, std::size_t d, const CalibrationParams& cal);
/// ceil(4 delta^-2 (log(2/gamma) + log C(p,<=d))): synthetic size for 4 delta accuracy.
std::uint64_t recommend_k(std::size_t p, std::size_t d, double gamma, double delta);

struct L1Deviation {
  double max_deviation = 0.0;   // over all trial directions
  double mean_deviation = 0.0;
  double envelope = 0.0;        // 2 sqrt(C(p,<=d) / m)
  std::size_t trials = 0;
};

/// Largest observed |‖F‖_{L1(mu_m)} - ‖F‖_{L1(mu)}| over random unit-L2
/// F in the degree-<=d span, with mu uniform on the cube (exact, p <= 14) and
/// mu_m the empirical measure of `sample`. A lower estimate of the supremum.
L1Deviation empirical_l1_deviation(const Dataset& sample, std::size_t d, std::size_t trials,
                                   std::uint64_t seed);

/// The deviation for one coefficient vector (not normalized).
double l1_deviation(const Dataset& sample, std::size_t d, std::span<const double> direction);

/// Draws sample = m uniform points from `seed` first.
L1Deviation empirical_l1_deviation(std::size_t p, std::size_t d, std::size_t m, std::size_t trials,
                                   std::uint64_t seed);

inline constexpr std::size_t kMaxFullCubeDimension = 14;

}  // namespace psyn
