#pragma once

// End-to-end private sampling:
//   draw S -> conditioning gate -> affine constraints M^T h = b
//   -> minimal shrinkage toward uniform-on-S -> proximal point h*
//   -> k i.i.d. slot draws from h*.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psyn/conditioning.hpp"
#include "psyn/cube.hpp"
#include "psyn/solver.hpp"

namespace psyn {

struct PipelineConfig {
  std::size_t p = 0;
  std::size_t d = 2;
  std::size_t m = 0;
  double delta = 0.05;
  double big_delta = 4.0;
  std::optional<std::uint64_t> k;  // unset: resolve from epsilon
  std::optional<double> epsilon;
  std::uint64_t seed = 0;
  int max_attempts = 16;
  SolverOptions solver;

  /// Throws ConfigError when an invariant fails:
  /// Delta > delta > 0, delta <= 1/2, Delta >= 1 + delta, d <= p,
  /// m >= C(p,<=d), and either k or epsilon present.
  void validate() const;
};

/// Result of the deterministic part of a run (everything before sampling).
struct DensityResult {
  std::shared_ptr<const ReducedSpace> space;
  FourierVector fourier;  // b of the true data
  double lambda = 0.0;
  int bisection_steps = 0;
  int undecided_probes = 0;
  SlotDensity density;
  double constraint_residual = 0.0;  // || M^T h* - ((1-lambda) b + lambda M^T u) ||_inf
};

struct Timings {
  double draw_ms = 0.0;
  double solve_ms = 0.0;  // Fourier data, shrinkage and proximal point
  double sample_ms = 0.0;
};

struct RunReport {
  ConditioningVerdict verdict;
  double lambda = 0.0;
  int bisection_steps = 0;
  int undecided_probes = 0;
  double constraint_residual = 0.0;
  double mass_error = 0.0;
  double dykstra_gap = 0.0;
  int dykstra_iterations = 0;
  double box_violation = 0.0;
  std::uint64_t k_used = 0;
  double epsilon_guaranteed = 0.0;
  double sensitivity_bound = 0.0;
  std::size_t n = 0;
  std::size_t duplicate_slots = 0;
  std::uint64_t seed = 0;
  std::uint64_t space_seed = 0;     // seed of the accepted S draw
  std::uint64_t sampling_seed = 0;
  std::vector<std::string> warnings;
  Timings timings;
};

struct GenerateResult {
  Dataset synthetic;
  DensityResult solution;
  RunReport report;
};

/// Steps after the reduced space is fixed: constraints, shrinkage, proximal
/// point. Audits call this directly with a shared S.
DensityResult solve_density(const Dataset& x, const PipelineConfig& cfg,
                            std::shared_ptr<const ReducedSpace> space);

/// Full run. Throws ConditioningFailure when S never passes the gate.
GenerateResult generate(const Dataset& x, const PipelineConfig& cfg);

/// k i.i.d. slot indices drawn by inverting the cumulative sum of the weights
/// (renormalized by their total). Throws IntegrityError on a weight below
/// -1e-12 or a total mass more than 1e-6 away from one.
std::vector<std::size_t> sample_slots(std::span<const double> weights, std::uint64_t k,
                                      std::uint64_t seed);

Dataset sample_categorical(std::span<const double> weights, const Dataset& slots, std::uint64_t k,
                           std::uint64_t seed);

/// Largest k the privacy budget epsilon admits for n records (before flooring).
double auto_k_real(const PipelineConfig& cfg, std::size_t n);
/// floor(auto_k_real); 0 when the budget admits no samples.
std::uint64_t auto_k(const PipelineConfig& cfg, std::size_t n);

}  // namespace psyn
