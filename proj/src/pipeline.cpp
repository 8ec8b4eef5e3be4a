#include "psyn/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "psyn/error.hpp"
#include "psyn/privacy.hpp"
#include "psyn/rng.hpp"

namespace psyn {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  if (!(big_delta > delta)) throw ConfigError("Delta must exceed delta");
  if (delta > 0.5) throw ConfigError("delta must be at most 1/2");
  if (big_delta < 1.0 + delta) throw ConfigError("Delta must be at least 1 + delta");
  if (d > p) throw ConfigError("degree " + std::to_string(d) + " exceeds dimension " + std::to_string(p));
  validate_space_shape(p, m, d);
  if (max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
  if (!k && !epsilon) throw ConfigError("either k or epsilon must be given");
  if (epsilon && !(*epsilon >= 0.0)) throw ConfigError("epsilon must be nonnegative");
}

DensityResult solve_density(const Dataset& x, const PipelineConfig& cfg,
                            std::shared_ptr<const ReducedSpace> space) {
  if (x.empty()) throw InputError("input dataset is empty");
  if (x.dimension() != space->p())
    throw InputError("input dimension " + std::to_string(x.dimension()) +
                     " does not match reduced space dimension " + std::to_string(space->p()));
  if (space->degree != cfg.d) throw ConfigError("reduced space was built for a different degree");

  DensityResult out;
  out.space = space;
  out.fourier = fourier_of_dataset(x, cfg.d);
  AffineConstraints constraints(space, out.fourier.coeffs);
  const std::size_t m = space->m();
  ShrinkResult shrink = shrinkage_lambda(constraints, Box::shrink(cfg.delta, cfg.big_delta, m), cfg.solver);
  out.lambda = shrink.lambda;
  out.bisection_steps = shrink.bisection_steps;
  out.undecided_probes = shrink.undecided_probes;
  out.density = proximal_point(shrink.shrunk, Box::select(cfg.delta, cfg.big_delta, m), cfg.solver);
  out.constraint_residual = shrink.shrunk.residual(out.density.weights);
  return out;
}

std::vector<std::size_t> sample_slots(std::span<const double> weights, std::uint64_t k,
                                      std::uint64_t seed) {
  if (weights.empty()) throw InputError("cannot sample from an empty density");
  std::vector<double> cumulative(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < -1e-12)
      throw IntegrityError("density has negative weight " + std::to_string(weights[i]) + " at slot " +
                           std::to_string(i));
    total += std::max(weights[i], 0.0);
    cumulative[i] = total;
  }
  if (std::abs(total - 1.0) > 1e-6)
    throw IntegrityError("density mass " + std::to_string(total) + " is not within 1e-6 of one");

  Rng rng(seed);
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::uint64_t draw = 0; draw < k; ++draw) {
    const double r = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    if (it == cumulative.end()) --it;
    out.push_back(static_cast<std::size_t>(it - cumulative.begin()));
  }
  return out;
}

Dataset sample_categorical(std::span<const double> weights, const Dataset& slots, std::uint64_t k,
                           std::uint64_t seed) {
  if (weights.size() != slots.size()) throw InputError("weights and slots differ in length");
  Dataset y(slots.dimension());
  y.reserve(k);
  for (std::size_t idx : sample_slots(weights, k, seed)) y.push_back(slots.row(idx));
  return y;
}

double auto_k_real(const PipelineConfig& cfg, std::size_t n) {
  if (!cfg.epsilon) throw ConfigError("auto k needs epsilon");
  const double c = static_cast<double>(count_low_degree(cfg.p, cfg.d));
  return (1.0 / (4.0 * std::numbers::sqrt2)) * *cfg.epsilon * std::pow(cfg.delta / cfg.big_delta, 1.5) *
         std::exp(-0.5 * static_cast<double>(cfg.d)) * std::pow(c, -0.25) *
         std::sqrt(static_cast<double>(n)) / std::pow(static_cast<double>(cfg.m), 0.75);
}

std::uint64_t auto_k(const PipelineConfig& cfg, std::size_t n) {
  return static_cast<std::uint64_t>(std::floor(auto_k_real(cfg, n)));
}

GenerateResult generate(const Dataset& x, const PipelineConfig& cfg) {
  cfg.validate();
  if (x.empty()) throw InputError("input dataset is empty");
  if (x.dimension() != cfg.p)
    throw InputError("input dimension " + std::to_string(x.dimension()) + " does not match p = " +
                     std::to_string(cfg.p));

  GenerateResult out;
  RunReport& report = out.report;
  report.seed = cfg.seed;
  report.n = x.size();

  auto t0 = Clock::now();
  auto space = std::make_shared<const ReducedSpace>(
      draw_until_conditioned(cfg.p, cfg.m, cfg.d, cfg.seed, cfg.max_attempts));
  report.timings.draw_ms = ms_since(t0);
  report.verdict = check_conditioning(*space);
  report.space_seed = space->seed_used;
  report.duplicate_slots = space->duplicate_slots;
  if (space->duplicate_slots > 0)
    report.warnings.push_back("reduced space contains " + std::to_string(space->duplicate_slots) +
                              " repeated slots; they are kept as distinct slots");

  t0 = Clock::now();
  out.solution = solve_density(x, cfg, space);
  report.timings.solve_ms = ms_since(t0);
  const SlotDensity& h = out.solution.density;
  report.lambda = out.solution.lambda;
  report.bisection_steps = out.solution.bisection_steps;
  report.undecided_probes = out.solution.undecided_probes;
  if (report.undecided_probes > 0)
    report.warnings.push_back(std::to_string(report.undecided_probes) +
                              " shrinkage probes near the boundary were undecided and treated as "
                              "infeasible; lambda stays certified feasible");
  report.constraint_residual = out.solution.constraint_residual;
  report.mass_error = h.mass_error;
  report.dykstra_gap = h.dykstra_gap;
  report.dykstra_iterations = h.iterations;
  report.box_violation = h.box_violation;

  if (cfg.k) {
    report.k_used = *cfg.k;
  } else {
    report.k_used = auto_k(cfg, x.size());
    if (report.k_used == 0)
      report.warnings.push_back("privacy budget admits no samples (auto k = 0)");
  }

  t0 = Clock::now();
  report.sampling_seed = derive_seed(cfg.seed, stream::kSampling);
  out.synthetic = sample_categorical(h.weights, space->slots, report.k_used, report.sampling_seed);
  report.timings.sample_ms = ms_since(t0);

  report.epsilon_guaranteed =
      epsilon_for_k(report.k_used, x.size(), cfg.m, cfg.p, cfg.d, cfg.delta, cfg.big_delta);
  report.sensitivity_bound = sensitivity_bound(x.size(), cfg.m, cfg.p, cfg.d, cfg.delta, cfg.big_delta);
  return out;
}

}  // namespace psyn
