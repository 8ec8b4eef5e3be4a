#include "psyn/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "psyn/error.hpp"

namespace psyn {

double sensitivity_bound(std::size_t n, std::size_t m, std::size_t p, std::size_t d, double delta,
                         double big_delta) {
  const double c = static_cast<double>(count_low_degree(p, d));
  return 4.0 * std::numbers::sqrt2 * std::pow(big_delta, 1.5) * std::exp(0.5 * static_cast<double>(d)) *
         std::pow(c, 0.25) /
         (std::sqrt(delta * static_cast<double>(n)) * std::pow(static_cast<double>(m), 0.25));
}

double epsilon_for_k(std::uint64_t k, std::size_t n, std::size_t m, std::size_t p, std::size_t d,
                     double delta, double big_delta) {
  const double c = static_cast<double>(count_low_degree(p, d));
  return 4.0 * std::numbers::sqrt2 * static_cast<double>(k) * std::pow(big_delta / delta, 1.5) *
         std::exp(0.5 * static_cast<double>(d)) * std::pow(c, 0.25) *
         std::pow(static_cast<double>(m), 0.75) / std::sqrt(static_cast<double>(n));
}

PrivacyBudget privacy_budget(std::uint64_t k, std::size_t n, std::size_t m, std::size_t p,
                             std::size_t d, double delta, double big_delta) {
  return {epsilon_for_k(k, n, m, p, d, delta, big_delta), k, n, m, d, p, delta, big_delta,
          sensitivity_bound(n, m, p, d, delta, big_delta)};
}

std::string to_string(NeighborRelation r) {
  switch (r) {
    case NeighborRelation::kIdentical: return "identical";
    case NeighborRelation::kAddOne: return "add-one";
    case NeighborRelation::kReplaceOne: return "replace-one";
  }
  return "unknown";
}

NeighborPair NeighborPair::add_one(Dataset base, const CubePoint& extra) {
  Dataset extended = base.with_appended(extra);
  return NeighborPair(std::move(base), std::move(extended), NeighborRelation::kAddOne);
}

NeighborPair NeighborPair::classify(Dataset first, Dataset second) {
  if (first.dimension() != second.dimension())
    throw InputError("neighbouring datasets must share a dimension");
  if (first == second) return NeighborPair(std::move(first), std::move(second), NeighborRelation::kIdentical);
  const Dataset& small = first.size() < second.size() ? first : second;
  const Dataset& large = first.size() < second.size() ? second : first;
  if (large.size() == small.size() + 1 &&
      std::equal(small.data().begin(), small.data().end(), large.data().begin()))
    return NeighborPair(std::move(first), std::move(second), NeighborRelation::kAddOne);
  if (first.size() == second.size()) {
    std::size_t differing = 0;
    for (std::size_t i = 0; i < first.size() && differing < 2; ++i)
      differing += std::equal(first.row(i).begin(), first.row(i).end(), second.row(i).begin()) ? 0 : 1;
    if (differing == 1)
      return NeighborPair(std::move(first), std::move(second), NeighborRelation::kReplaceOne);
  }
  throw InputError("datasets are not neighbours: expected identical data, one appended record, or "
                   "one replaced record");
}

double neighbor_fourier_gap(const NeighborPair& pair, std::size_t d) {
  const auto a = fourier_of_dataset(pair.first(), d);
  const auto b = fourier_of_dataset(pair.second(), d);
  double s = 0.0;
  for (std::size_t j = 0; j < a.coeffs.size(); ++j) {
    const double diff = b.coeffs[j] - a.coeffs[j];
    s += diff * diff;
  }
  return std::sqrt(s);
}

double neighbor_fourier_bound(std::size_t n, std::size_t p, std::size_t d) {
  return 2.0 / static_cast<double>(n) * std::sqrt(static_cast<double>(count_low_degree(p, d)));
}

double audit_margin(const SolverOptions& opt, std::size_t m) {
  return 10.0 * std::max(opt.dykstra_change_tol_rel, opt.feasibility_tol_rel) / static_cast<double>(m);
}

AuditRecord audit_sensitivity(const NeighborPair& pair, const PipelineConfig& cfg,
                              std::shared_ptr<const ReducedSpace> space, std::uint64_t k,
                              double epsilon) {
  const DensityResult r1 = solve_density(pair.first(), cfg, space);
  const DensityResult r2 = solve_density(pair.second(), cfg, space);
  const auto& h1 = r1.density.weights;
  const auto& h2 = r2.density.weights;
  const std::size_t m = space->m();

  AuditRecord rec;
  rec.relation = pair.relation();
  rec.n = pair.n();
  rec.lambda_first = r1.lambda;
  rec.lambda_second = r2.lambda;
  rec.eta = sensitivity_bound(rec.n, m, cfg.p, cfg.d, cfg.delta, cfg.big_delta);
  const double factor = pair.relation() == NeighborRelation::kIdentical ? 0.0
                        : pair.relation() == NeighborRelation::kAddOne  ? 1.0
                                                                        : 2.0;
  rec.allowed = factor * rec.eta + audit_margin(cfg.solver, m);
  rec.max_ratio = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    rec.sup_distance = std::max(rec.sup_distance, std::abs(h1[i] - h2[i]));
    rec.max_ratio = std::max({rec.max_ratio, h1[i] / h2[i], h2[i] / h1[i]});
  }
  rec.ratio_bound = 1.0 + factor * rec.eta * static_cast<double>(m) / cfg.delta;
  // Identical inputs still get the margin, expressed on the ratio scale.
  rec.ratio_bound += audit_margin(cfg.solver, m) * static_cast<double>(m) / cfg.delta;
  rec.k = k;
  rec.epsilon = epsilon;
  rec.sampling_threshold =
      k == 0 ? std::numeric_limits<double>::infinity() : std::exp(epsilon / static_cast<double>(k));
  rec.violation = rec.sup_distance > rec.allowed || rec.max_ratio > rec.ratio_bound;
  return rec;
}

}  // namespace psyn
