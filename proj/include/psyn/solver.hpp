#pragma once

// Weights h over the slots of a reduced space constrained by
//   M^T h = t          (the affine solution space)
//   lo <= h_i <= hi    (a box)
// Every primitive is a Euclidean projection: onto the affine set through the
// cached Gram eigendecomposition, onto the box by clamping. Feasibility uses
// alternating projections; the nearest point uses Dykstra's scheme.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "psyn/conditioning.hpp"

namespace psyn {

/// Uniform bounds lo <= h_i <= hi. lo = 0, hi = +inf is the nonnegative orthant.
struct Box {
  double lo = 0.0;
  double hi = 0.0;

  /// Throws ConfigError unless 0 <= lo < hi.
  static Box make(double lo, double hi);
  static Box nonnegative();
  /// [2 delta/m, (Delta - delta)/m], the box that fixes the shrinkage amount.
  static Box shrink(double delta, double big_delta, std::size_t m);
  /// [delta/m, Delta/m], the box the proximal point is selected from.
  static Box select(double delta, double big_delta, std::size_t m);

  bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
};

struct SolverOptions {
  // Alternating projections declare feasibility once the affine iterate is
  // within feasibility_tol_rel / m of the box in the max norm.
  double feasibility_tol_rel = 1e-9;
  int max_pocs_iterations = 100000;
  int stagnation_window = 100;
  double stagnation_rel = 1e-3;
  double lambda_tol = 1e-9;
  // Newton iterations for one shrinkage probe. An undecided probe counts as
  // infeasible: lambda moves up and stays certified by a witness.
  int max_newton_iterations = 50;
  int max_dykstra_iterations = 100000;
  // Dykstra stops when successive iterates move by at most change_tol_rel / m
  // and the affine residual is at most residual_tol.
  double dykstra_change_tol_rel = 1e-10;
  double dykstra_residual_tol = 1e-9;
};

class AffineConstraints {
 public:
  /// Throws ConditioningViolation if the Gram matrix is singular, unless
  /// allow_rank_deficient is set (projections then use the pseudo-inverse).
  AffineConstraints(std::shared_ptr<const ReducedSpace> space, std::vector<double> target,
                    bool allow_rank_deficient = false);

  const ReducedSpace& space() const { return *space_; }
  const std::shared_ptr<const ReducedSpace>& space_ptr() const { return space_; }
  std::span<const double> target() const { return target_; }
  std::size_t m() const { return space_->m(); }
  std::size_t columns() const { return target_.size(); }

  AffineConstraints with_target(std::vector<double> target) const;

  /// out = z - M G^+ (M^T z - t). out may alias z.
  void project(std::span<const double> z, std::span<double> out) const;

  /// || M^T h - t ||_inf
  double residual(std::span<const double> h) const;

  /// Whether M^T h = t has a solution (always true at full rank).
  bool consistent() const;

 private:
  std::shared_ptr<const ReducedSpace> space_;
  std::vector<double> target_;
};

/// Weights 1/m on every slot.
std::vector<double> uniform_weights(std::size_t m);

/// M^T u for the uniform weights u, i.e. the Fourier data of uniform-on-S.
std::vector<double> uniform_target(const ReducedSpace& rs);

/// (1 - lambda) b + lambda M^T u
std::vector<double> shrunk_target(std::span<const double> b, std::span<const double> uniform,
                                  double lambda);

std::vector<double> project_affine(std::span<const double> z, const AffineConstraints& a);
std::vector<double> project_box(std::span<const double> z, const Box& box);

// kUndecided only appears in bisection probes; feasibility() throws instead.
enum class Feasibility { kFeasible, kInfeasible, kUndecided };

struct FeasibilityResult {
  Feasibility verdict = Feasibility::kInfeasible;
  std::vector<double> witness;  // last affine iterate; within tol of the box when feasible
  double gap = 0.0;             // max distance of the affine iterate to the box
  int iterations = 0;
  bool feasible() const { return verdict == Feasibility::kFeasible; }
};

/// Alternating projections from the uniform vector. Throws IndeterminateError
/// if the gap neither drops below `tol` nor stagnates within the iteration cap.
FeasibilityResult feasibility(const AffineConstraints& a, const Box& box, double tol,
                              const SolverOptions& opt = {});

/// Same, with tol = opt.feasibility_tol_rel / m.
FeasibilityResult feasibility(const AffineConstraints& a, const Box& box,
                              const SolverOptions& opt = {});

struct ShrinkResult {
  double lambda = 0.0;
  AffineConstraints shrunk;
  FeasibilityResult witness;
  int bisection_steps = 0;
  int undecided_probes = 0;  // probes counted as infeasible without a verdict
};

/// Minimal lambda in [0,1] (rounded up by at most opt.lambda_tol) for which
/// the target (1 - lambda) b + lambda M^T u meets shrink_box. Bisection is
/// valid because feasibility is monotone in lambda: u lies inside shrink_box.
/// Throws ConfigError if 1/m is outside shrink_box.
ShrinkResult shrinkage_lambda(const AffineConstraints& a, const Box& shrink_box,
                              const SolverOptions& opt = {});

struct SlotDensity {
  std::vector<double> weights;
  double residual = 0.0;    // || M^T h - t ||_inf
  double mass_error = 0.0;  // | sum h - 1 |
  double dykstra_gap = 0.0; // || affine iterate - box iterate ||_inf at exit
  double box_violation = 0.0;
  int iterations = 0;
};

/// Euclidean projection of the uniform vector onto {M^T h = t} intersected
/// with `box`, by Dykstra's algorithm. Throws NumericError on non-convergence.
SlotDensity proximal_point(const AffineConstraints& a, const Box& box, const SolverOptions& opt = {});

/// Dykstra from an arbitrary start point (used by uniqueness checks).
SlotDensity project_onto_intersection(std::span<const double> start, const AffineConstraints& a,
                                      const Box& box, const SolverOptions& opt = {});

}  // namespace psyn
