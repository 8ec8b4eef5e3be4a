#pragma once

// Privacy budget formulas and the neighbouring-dataset audit harness.

#include <cstdint>
#include <memory>
#include <string>

#include "psyn/cube.hpp"
#include "psyn/pipeline.hpp"

namespace psyn {

/// eta = 4 sqrt(2) Delta^{3/2} e^{d/2} C(p,<=d)^{1/4} / (sqrt(delta n) m^{1/4}),
/// the sup-norm distance bound between the densities of neighbouring inputs.
double sensitivity_bound(std::size_t n, std::size_t m, std::size_t p, std::size_t d, double delta,
                         double big_delta);

/// epsilon = 4 sqrt(2) k (Delta/delta)^{3/2} e^{d/2} C(p,<=d)^{1/4} m^{3/4} / sqrt(n)
double epsilon_for_k(std::uint64_t k, std::size_t n, std::size_t m, std::size_t p, std::size_t d,
                     double delta, double big_delta);

struct PrivacyBudget {
  double epsilon = 0.0;
  std::uint64_t k = 0;
  std::size_t n = 0, m = 0, d = 0, p = 0;
  double delta = 0.0, big_delta = 0.0;
  double sensitivity_eta = 0.0;
};

PrivacyBudget privacy_budget(std::uint64_t k, std::size_t n, std::size_t m, std::size_t p,
                             std::size_t d, double delta, double big_delta);

enum class NeighborRelation { kIdentical, kAddOne, kReplaceOne };

std::string to_string(NeighborRelation r);

class NeighborPair {
 public:
  /// `extended` must equal `base` plus one appended record.
  static NeighborPair add_one(Dataset base, const CubePoint& extra);
  /// Classifies two datasets; throws InputError if they are not neighbours
  /// (identical, one appended record, or one replaced record).
  static NeighborPair classify(Dataset first, Dataset second);

  const Dataset& first() const { return first_; }
  const Dataset& second() const { return second_; }
  NeighborRelation relation() const { return relation_; }
  /// The smaller dataset size, which the sensitivity bound is stated for.
  std::size_t n() const { return std::min(first_.size(), second_.size()); }

 private:
  NeighborPair(Dataset a, Dataset b, NeighborRelation r)
      : first_(std::move(a)), second_(std::move(b)), relation_(r) {}
  Dataset first_, second_;
  NeighborRelation relation_;
};

/// || b_second - b_first ||_2 over all coefficients of degree <= d.
double neighbor_fourier_gap(const NeighborPair& pair, std::size_t d);
/// (2/n) sqrt(C(p,<=d)), the bound the gap obeys for add-one pairs.
double neighbor_fourier_bound(std::size_t n, std::size_t p, std::size_t d);

struct AuditRecord {
  NeighborRelation relation = NeighborRelation::kAddOne;
  std::size_t n = 0;
  double sup_distance = 0.0;  // || h1 - h2 ||_inf
  double eta = 0.0;
  double allowed = 0.0;       // eta (add-one), 2 eta (replace-one) or 0, plus margin
  double max_ratio = 0.0;     // max over slots and both directions of h1/h2
  double ratio_bound = 0.0;   // 1 + eta m / delta
  double lambda_first = 0.0, lambda_second = 0.0;
  std::uint64_t k = 0;
  double epsilon = 0.0;
  double sampling_threshold = 0.0;  // exp(epsilon / k); +inf when k = 0
  bool violation = false;
};

/// Margin added to the bound before flagging a violation: ten times the
/// solver's stopping tolerance on weights.
double audit_margin(const SolverOptions& opt, std::size_t m);

/// Solves both datasets on the same S and compares the densities.
/// `k` and `epsilon` only feed the reported sampling threshold.
AuditRecord audit_sensitivity(const NeighborPair& pair, const PipelineConfig& cfg,
                              std::shared_ptr<const ReducedSpace> space, std::uint64_t k,
                              double epsilon);

}  // namespace psyn
