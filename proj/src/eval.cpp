#include "psyn/eval.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "psyn/error.hpp"
#include "psyn/kernels.hpp"
#include "psyn/rng.hpp"

namespace psyn {
namespace {

AccuracyReport compare_fourier(const FourierVector& truth, const FourierVector& other, std::size_t p,
                               std::size_t d, std::size_t max_queries) {
  const std::size_t count = count_marginal_queries(p, d);
  if (count > max_queries)
    throw ConfigError("accuracy report needs " + std::to_string(count) + " queries, above the cap of " +
                      std::to_string(max_queries));
  AccuracyReport out;
  out.degree = d;
  out.per_query.reserve(count);
  double total = 0.0;
  for (auto& q : enumerate_marginal_queries(p, d)) {
    const double err = std::min(
        1.0, std::abs(marginal_from_fourier(other, q) - marginal_from_fourier(truth, q)));
    out.max_error = std::max(out.max_error, err);
    total += err;
    out.per_query.push_back({std::move(q), err});
  }
  out.mean_error = out.per_query.empty() ? 0.0 : total / static_cast<double>(out.per_query.size());
  return out;
}

// Walsh values of one point for every subset in `subsets`.
void walsh_row(std::span<const Sign> x, const std::vector<WalshIndex>& subsets, std::vector<double>& out) {
  for (std::size_t j = 0; j < subsets.size(); ++j) out[j] = walsh_eval(subsets[j], x);
}

}  // namespace

AccuracyReport accuracy_report(const Dataset& x, const Dataset& y, std::size_t d,
                               std::size_t max_queries) {
  if (x.empty() || y.empty()) throw InputError("accuracy needs two nonempty datasets");
  if (x.dimension() != y.dimension())
    throw InputError("datasets differ in dimension: " + std::to_string(x.dimension()) + " vs " +
                     std::to_string(y.dimension()));
  return compare_fourier(fourier_of_dataset(x, d), fourier_of_dataset(y, d), x.dimension(), d,
                         max_queries);
}

AccuracyReport density_accuracy(const Dataset& x, const ReducedSpace& space,
                                std::span<const double> weights, std::size_t max_queries) {
  if (x.empty()) throw InputError("accuracy needs a nonempty dataset");
  if (x.dimension() != space.p()) throw InputError("dataset and reduced space differ in dimension");
  if (weights.size() != space.m()) throw InputError("weights do not match the reduced space");
  FourierVector fh{space.p(), space.degree, std::vector<double>(space.columns())};
  space.design.multiply_transpose(weights, fh.coeffs);
  return compare_fourier(fourier_of_dataset(x, space.degree), fh, space.p(), space.degree, max_queries);
}

MatchResult exact_match_target(std::shared_ptr<const ReducedSpace> space, std::vector<double> target,
                               const SolverOptions& opt) {
  AffineConstraints a(std::move(space), std::move(target), /*allow_rank_deficient=*/true);
  MatchResult out;
  if (!a.consistent()) {
    out.reason = "affine constraints M^T h = b have no solution on this S";
    return out;
  }
  const FeasibilityResult f = feasibility(a, Box::nonnegative(), opt);
  out.feasibility_gap = f.gap;
  if (!f.feasible()) {
    out.reason = "alternating projections stagnated at gap " + std::to_string(f.gap) + " after " +
                 std::to_string(f.iterations) + " iterations";
    return out;
  }
  out.density = proximal_point(a, Box::nonnegative(), opt);
  out.outcome = MatchOutcome::kWitness;
  return out;
}

MatchResult exact_match(const Dataset& x, std::shared_ptr<const ReducedSpace> space,
                        const SolverOptions& opt) {
  if (x.empty()) throw InputError("input dataset is empty");
  if (x.dimension() != space->p()) throw InputError("dataset and reduced space differ in dimension");
  auto b = fourier_of_dataset(x, space->degree);
  return exact_match_target(std::move(space), std::move(b.coeffs), opt);
}

void CalibrationParams::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  if (!(kappa >= 1.0)) throw ConfigError("kappa must be at least 1");
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
}

namespace {

std::uint64_t checked_ceil(long double v) {
  if (!(v < 1.8e19L)) throw ConfigError("recommended size overflows 64 bits");
  return static_cast<std::uint64_t>(std::ceil(v));
}

}  // namespace

std::uint64_t recommend_m(std::size_t p, std::size_t d, const CalibrationParams& cal) {
  cal.validate();
  const long double c = static_cast<long double>(count_low_degree(p, d));
  return checked_ceil(16.0L / (cal.gamma * static_cast<long double>(cal.gamma)) *
                      std::exp(2.0L * static_cast<long double>(d)) * c);
}

std::uint64_t recommend_m_matching(std::size_t p, std::size_t d, const CalibrationParams& cal) {
  cal.validate();
  const long double c = static_cast<long double>(count_low_degree(p, d));
  const long double ad = static_cast<long double>(cal.alpha) * cal.delta;
  return checked_ceil(16.0L / (ad * ad) / cal.gamma * cal.kappa * static_cast<long double>(cal.kappa) *
                      std::exp(2.0L * static_cast<long double>(d)) * c);
}

std::uint64_t recommend_k(std::size_t p, std::size_t d, double gamma, double delta) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("delta must lie in (0, 1]");
  const long double c = static_cast<long double>(count_low_degree(p, d));
  return checked_ceil(4.0L / (static_cast<long double>(delta) * delta) *
                      (std::log(2.0L / gamma) + std::log(c)));
}

namespace {

void check_l1_inputs(const Dataset& sample) {
  if (sample.dimension() > kMaxFullCubeDimension)
    throw ConfigError("exact cube enumeration is limited to p <= " + std::to_string(kMaxFullCubeDimension));
  if (sample.empty()) throw InputError("sample is empty");
}

// |mean_sample |F_t| - mean_cube |F_t||  for F_t = sum_J dirs[t][J] w_J.
std::vector<double> l1_deviations(const Dataset& sample, std::size_t d,
                                  const std::vector<std::vector<double>>& dirs) {
  const std::size_t p = sample.dimension();
  const auto subsets = enumerate_low_degree(p, d);
  const std::size_t trials = dirs.size();
  std::vector<double> pop(trials, 0.0), emp(trials, 0.0), w(subsets.size());
  std::vector<Sign> x(p);
  const std::size_t cube = std::size_t{1} << p;
  for (std::size_t bits = 0; bits < cube; ++bits) {
    for (std::size_t j = 0; j < p; ++j) x[j] = (bits >> j) & 1 ? Sign{1} : Sign{-1};
    walsh_row(x, subsets, w);
    for (std::size_t t = 0; t < trials; ++t) pop[t] += std::abs(kernels::dot(w, dirs[t]));
  }
  for (std::size_t i = 0; i < sample.size(); ++i) {
    walsh_row(sample.row(i), subsets, w);
    for (std::size_t t = 0; t < trials; ++t) emp[t] += std::abs(kernels::dot(w, dirs[t]));
  }
  std::vector<double> out(trials);
  for (std::size_t t = 0; t < trials; ++t)
    out[t] = std::abs(emp[t] / static_cast<double>(sample.size()) - pop[t] / static_cast<double>(cube));
  return out;
}

}  // namespace

double l1_deviation(const Dataset& sample, std::size_t d, std::span<const double> direction) {
  check_l1_inputs(sample);
  if (direction.size() != count_low_degree(sample.dimension(), d))
    throw InputError("direction length does not match C(p,<=d)");
  return l1_deviations(sample, d, {std::vector<double>(direction.begin(), direction.end())}).front();
}

L1Deviation empirical_l1_deviation(const Dataset& sample, std::size_t d, std::size_t trials,
                                   std::uint64_t seed) {
  check_l1_inputs(sample);
  if (trials == 0) throw ConfigError("trials must be positive");
  const std::size_t c = count_low_degree(sample.dimension(), d);
  Rng rng(seed, stream::kEvalDirections);
  std::vector<std::vector<double>> dirs(trials, std::vector<double>(c));
  for (auto& a : dirs) {
    double norm = 0.0;
    while (norm == 0.0) {
      for (auto& v : a) v = rng.normal();
      norm = std::sqrt(kernels::dot(a, a));
    }
    for (auto& v : a) v /= norm;
  }
  const std::vector<double> devs = l1_deviations(sample, d, dirs);

  L1Deviation out;
  out.trials = trials;
  out.envelope = 2.0 * std::sqrt(static_cast<double>(c) / static_cast<double>(sample.size()));
  double total = 0.0;
  for (double dev : devs) {
    out.max_deviation = std::max(out.max_deviation, dev);
    total += dev;
  }
  out.mean_deviation = total / static_cast<double>(trials);
  return out;
}

L1Deviation empirical_l1_deviation(std::size_t p, std::size_t d, std::size_t m, std::size_t trials,
                                   std::uint64_t seed) {
  if (p > kMaxFullCubeDimension)
    throw ConfigError("exact cube enumeration is limited to p <= " + std::to_string(kMaxFullCubeDimension));
  Rng rng(seed, stream::kReducedSpace);
  Dataset sample(p);
  sample.reserve(m);
  std::vector<Sign> x(p);
  for (std::size_t i = 0; i < m; ++i) {
    for (auto& v : x) v = static_cast<Sign>(rng.sign());
    sample.push_back(x);
  }
  return empirical_l1_deviation(sample, d, trials, seed);
}

}  // namespace psyn
