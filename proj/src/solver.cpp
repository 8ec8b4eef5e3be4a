#include "psyn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <string>

#include "psyn/error.hpp"
#include "psyn/kernels.hpp"

namespace psyn {
namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double box_violation(std::span<const double> h, const Box& box) {
  double v = 0.0;
  for (double x : h) v = std::max({v, box.lo - x, x - box.hi});
  return v;
}

}  // namespace

Box Box::make(double lo, double hi) {
  if (!(lo >= 0.0) || !(lo < hi))
    throw ConfigError("box bounds must satisfy 0 <= lo < hi (got lo=" + std::to_string(lo) +
                      ", hi=" + std::to_string(hi) + ")");
  return Box{lo, hi};
}

Box Box::nonnegative() { return Box{0.0, std::numeric_limits<double>::infinity()}; }

Box Box::shrink(double delta, double big_delta, std::size_t m) {
  const auto md = static_cast<double>(m);
  return make(2.0 * delta / md, (big_delta - delta) / md);
}

Box Box::select(double delta, double big_delta, std::size_t m) {
  const auto md = static_cast<double>(m);
  return make(delta / md, big_delta / md);
}

AffineConstraints::AffineConstraints(std::shared_ptr<const ReducedSpace> space,
                                     std::vector<double> target, bool allow_rank_deficient)
    : space_(std::move(space)), target_(std::move(target)) {
  if (!space_) throw ConfigError("affine constraints need a reduced space");
  if (target_.size() != space_->columns())
    throw ConfigError("target has " + std::to_string(target_.size()) + " entries, design has " +
                      std::to_string(space_->columns()) + " columns");
  if (!allow_rank_deficient && !space_->solver.full_rank())
    throw ConditioningViolation("Gram matrix is singular (rank " +
                                std::to_string(space_->solver.rank()) + " of " +
                                std::to_string(space_->columns()) + ")");
}

AffineConstraints AffineConstraints::with_target(std::vector<double> target) const {
  AffineConstraints out = *this;
  if (target.size() != target_.size()) throw ConfigError("target length mismatch");
  out.target_ = std::move(target);
  return out;
}

void AffineConstraints::project(std::span<const double> z, std::span<double> out) const {
  const DesignMatrix& design = space_->design;
  const std::size_t c = columns();
  std::vector<double> r(c), y(c);
  if (out.data() != z.data()) std::copy(z.begin(), z.end(), out.begin());
  const double scale = std::max(1.0, max_abs(target_));
  const auto& k = kernels::active();
  // One correction pass, plus a refinement pass if rounding left a residual.
  for (int pass = 0; pass < 2; ++pass) {
    design.multiply_transpose(out, r);
    for (std::size_t j = 0; j < c; ++j) r[j] -= target_[j];
    if (pass == 1 && max_abs(r) <= 1e-14 * scale) break;
    space_->solver.solve(r, y);
    for (std::size_t j = 0; j < c; ++j) k.axpy(-y[j], design.col(j).data(), out.data(), out.size());
  }
}

double AffineConstraints::residual(std::span<const double> h) const {
  std::vector<double> r(columns());
  space_->design.multiply_transpose(h, r);
  double m = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j) m = std::max(m, std::abs(r[j] - target_[j]));
  return m;
}

bool AffineConstraints::consistent() const {
  if (space_->solver.full_rank()) return true;
  std::vector<double> h(m(), 0.0);
  project(h, h);
  return residual(h) <= 1e-9 * std::max(1.0, max_abs(target_));
}

std::vector<double> uniform_weights(std::size_t m) {
  return std::vector<double>(m, 1.0 / static_cast<double>(m));
}

std::vector<double> uniform_target(const ReducedSpace& rs) {
  std::vector<double> t(rs.columns());
  const auto u = uniform_weights(rs.m());
  rs.design.multiply_transpose(u, t);
  return t;
}

std::vector<double> shrunk_target(std::span<const double> b, std::span<const double> uniform,
                                  double lambda) {
  std::vector<double> t(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) t[j] = (1.0 - lambda) * b[j] + lambda * uniform[j];
  return t;
}

std::vector<double> project_affine(std::span<const double> z, const AffineConstraints& a) {
  std::vector<double> out(z.size());
  a.project(z, out);
  return out;
}

std::vector<double> project_box(std::span<const double> z, const Box& box) {
  std::vector<double> out(z.size());
  kernels::clamp(z, box.lo, box.hi, out);
  return out;
}

namespace {

// Dense Cholesky solve of a symmetric positive definite c x c system (row-major).
// Returns false if a pivot is not positive.
bool cholesky_solve(std::vector<double>& a, std::size_t c, std::span<double> x) {
  for (std::size_t j = 0; j < c; ++j) {
    double d = a[j * c + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * c + k] * a[j * c + k];
    if (!(d > 0.0)) return false;
    d = std::sqrt(d);
    a[j * c + j] = d;
    for (std::size_t i = j + 1; i < c; ++i) {
      double v = a[i * c + j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i * c + k] * a[j * c + k];
      a[i * c + j] = v / d;
    }
  }
  for (std::size_t i = 0; i < c; ++i) {
    double v = x[i];
    for (std::size_t k = 0; k < i; ++k) v -= a[i * c + k] * x[k];
    x[i] = v / a[i * c + i];
  }
  for (std::size_t i = c; i-- > 0;) {
    double v = x[i];
    for (std::size_t k = i + 1; k < c; ++k) v -= a[k * c + i] * x[k];
    x[i] = v / a[i * c + i];
  }
  return true;
}

FeasibilityResult pocs(const AffineConstraints& a, const Box& box, double tol, const SolverOptions& opt) {
  const std::size_t m = a.m();
  std::vector<double> h = uniform_weights(m);
  std::vector<double> aff(m);
  std::deque<double> history;
  FeasibilityResult res;
  for (int it = 1; it <= opt.max_pocs_iterations; ++it) {
    a.project(h, aff);
    kernels::clamp(aff, box.lo, box.hi, h);
    const double gap = kernels::max_abs_diff(aff, h);
    res.iterations = it;
    res.gap = gap;
    if (gap <= tol) {
      res.verdict = Feasibility::kFeasible;
      res.witness = std::move(aff);
      return res;
    }
    history.push_back(gap);
    if (static_cast<int>(history.size()) > opt.stagnation_window) {
      const double old = history.front();
      history.pop_front();
      if (old - gap <= opt.stagnation_rel * old) {
        res.verdict = Feasibility::kInfeasible;
        res.witness = std::move(aff);
        return res;
      }
    }
  }
  res.verdict = Feasibility::kUndecided;
  res.witness = std::move(aff);
  return res;
}

struct Probe {
  FeasibilityResult result;
  std::vector<double> separator;  // y with t^T y > support of the box on M y (infeasible only)
};

// Feasibility of {M^T h = t} with the box, decided through the dual of the
// projection of u onto the intersection: maximize
//   q(y) = 1/2 ||h(y) - u||^2 + y^T (t - M^T h(y)),  h(y) = clamp(u + M y),
// by semismooth Newton. q is bounded exactly when the set is nonempty; the
// affine projection of h(y) is the feasibility witness, and a y whose support
// value falls below t^T y is an exact infeasibility certificate.
Probe dual_newton_probe(const AffineConstraints& a, const Box& box, double tol, const SolverOptions& opt) {
  const DesignMatrix& M = a.space().design;
  const std::size_t m = a.m();
  const std::size_t c = a.columns();
  const double u = 1.0 / static_cast<double>(m);
  const auto t = a.target();
  const auto& k = kernels::active();

  std::vector<double> y(c, 0.0), z(m), h(m), r(c), aff(m);
  std::vector<double> y2(c), z2(m), h2(m), r2(c), dir(c), masked(m * c), jac(c * c);

  auto eval = [&](const std::vector<double>& yy, std::vector<double>& zz, std::vector<double>& hh,
                  std::vector<double>& rr) {
    M.multiply(yy, zz);
    for (auto& v : zz) v += u;
    k.clamp(zz.data(), box.lo, box.hi, hh.data(), m);
    M.multiply_transpose(hh, rr);
    double q = 0.0;
    for (std::size_t i = 0; i < m; ++i) q += 0.5 * (hh[i] - u) * (hh[i] - u);
    for (std::size_t j = 0; j < c; ++j) {
      rr[j] = t[j] - rr[j];
      q += yy[j] * rr[j];
    }
    return q;
  };

  Probe out;
  FeasibilityResult& res = out.result;
  double q = eval(y, z, h, r);
  for (int it = 1; it <= opt.max_newton_iterations; ++it) {
    res.iterations = it;
    a.project(h, aff);
    res.gap = box_violation(aff, box);
    if (res.gap <= tol) {
      res.verdict = Feasibility::kFeasible;
      res.witness = std::move(aff);
      return out;
    }

    // z - u = M y: compare t^T y with the support of the box in that direction.
    double support = 0.0, scale = 0.0, ty = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = z[i] - u;
      support += std::max(box.lo * d, box.hi * d);
      scale += std::abs(d) * box.hi;
    }
    for (std::size_t j = 0; j < c; ++j) {
      ty += t[j] * y[j];
      scale += std::abs(t[j] * y[j]);
    }
    if (ty - support > 1e-12 * scale) {
      res.verdict = Feasibility::kInfeasible;
      res.witness = std::move(aff);
      out.separator = y;
      return out;
    }

    // Generalized Hessian M^T D M over the coordinates strictly inside the box.
    std::size_t free_count = 0;
    for (std::size_t i = 0; i < m; ++i) free_count += (z[i] > box.lo && z[i] < box.hi) ? 1 : 0;
    for (std::size_t j = 0; j < c; ++j) {
      const auto col = M.col(j);
      double* dst = masked.data() + j * m;
      for (std::size_t i = 0; i < m; ++i) dst[i] = (z[i] > box.lo && z[i] < box.hi) ? col[i] : 0.0;
    }
    const double ridge = 1e-10 * static_cast<double>(std::max<std::size_t>(free_count, 1));
    for (std::size_t i = 0; i < c; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        const double v = k.dot(masked.data() + i * m, M.col(j).data(), m);
        jac[i * c + j] = jac[j * c + i] = v;
      }
    for (std::size_t j = 0; j < c; ++j) jac[j * c + j] += ridge;
    dir = r;
    if (!cholesky_solve(jac, c, dir)) break;

    double slope = 0.0;
    for (std::size_t j = 0; j < c; ++j) slope += r[j] * dir[j];
    bool accepted = false;
    for (double step = 1.0; step > 1e-12; step *= 0.5) {
      for (std::size_t j = 0; j < c; ++j) y2[j] = y[j] + step * dir[j];
      const double q2 = eval(y2, z2, h2, r2);
      if (q2 >= q + 1e-4 * step * slope) {
        y.swap(y2);
        z.swap(z2);
        h.swap(h2);
        r.swap(r2);
        q = q2;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  a.project(h, aff);
  res.gap = box_violation(aff, box);
  res.verdict = res.gap <= tol ? Feasibility::kFeasible : Feasibility::kUndecided;
  res.witness = std::move(aff);
  return out;
}

}  // namespace

FeasibilityResult feasibility(const AffineConstraints& a, const Box& box, double tol,
                              const SolverOptions& opt) {
  FeasibilityResult res = pocs(a, box, tol, opt);
  if (res.verdict != Feasibility::kUndecided) return res;
  std::ostringstream msg;
  msg << "alternating projections indeterminate after " << opt.max_pocs_iterations
      << " iterations (gap " << res.gap << ", tol " << tol << ")";
  throw IndeterminateError(msg.str());
}

FeasibilityResult feasibility(const AffineConstraints& a, const Box& box, const SolverOptions& opt) {
  return feasibility(a, box, opt.feasibility_tol_rel / static_cast<double>(a.m()), opt);
}

ShrinkResult shrinkage_lambda(const AffineConstraints& a, const Box& shrink_box,
                              const SolverOptions& opt) {
  const double u = 1.0 / static_cast<double>(a.m());
  if (!shrink_box.contains(u))
    throw ConfigError("shrink box must contain the uniform weight 1/m; need delta <= 1/2 and "
                      "Delta >= 1 + delta");
  const std::vector<double> b(a.target().begin(), a.target().end());
  const std::vector<double> tu = uniform_target(a.space());
  // Decide against the box pulled in by the tolerance, so every "feasible"
  // witness lies inside shrink_box itself and lambda errs on the feasible side.
  const double tol = opt.feasibility_tol_rel / static_cast<double>(a.m());
  const Box inner{shrink_box.lo + tol, shrink_box.hi - tol};
  const double depth = std::min(u - inner.lo, inner.hi - u);
  int undecided = 0;

  double lo = 0.0;
  double hi = 1.0;
  FeasibilityResult best;
  best.verdict = Feasibility::kFeasible;
  best.witness = uniform_weights(a.m());

  // An affine iterate z at lambda within gap g of the box certifies a larger
  // lambda: (1 - s) z + s u with s = g / (depth + g) lies in the box and meets
  // the target at lambda + s (1 - lambda).
  auto certify_above = [&](const FeasibilityResult& r, double lambda) {
    const double s = r.gap / (depth + r.gap);
    const double cand = lambda + s * (1.0 - lambda);
    if (!(cand < hi)) return;
    hi = cand;
    best.verdict = Feasibility::kFeasible;
    best.iterations = r.iterations;
    best.gap = 0.0;
    best.witness.resize(r.witness.size());
    for (std::size_t i = 0; i < r.witness.size(); ++i) best.witness[i] = (1.0 - s) * r.witness[i] + s * u;
  };
  // A separator y rules out every lambda with t(lambda)^T y above the support
  // value; t is affine in lambda and u is feasible, so that is an interval [0, l).
  auto certify_below = [&](const std::vector<double>& y) {
    const DesignMatrix& M = a.space().design;
    std::vector<double> my(a.m());
    M.multiply(y, my);
    double support = 0.0, by = 0.0, uy = 0.0;
    for (double d : my) support += std::max(inner.lo * d, inner.hi * d);
    for (std::size_t j = 0; j < y.size(); ++j) {
      by += b[j] * y[j];
      uy += tu[j] * y[j];
    }
    if (by - uy <= 0.0) return;
    const double l = (by - support) / (by - uy) * (1.0 - 1e-12);
    lo = std::min(std::max(lo, l), hi);
  };
  auto probe = [&](double lambda) {
    const AffineConstraints c = lambda == 0.0 ? a : a.with_target(shrunk_target(b, tu, lambda));
    return dual_newton_probe(c, inner, tol, opt);
  };

  Probe at_zero = probe(0.0);
  if (at_zero.result.feasible()) return ShrinkResult{0.0, a, std::move(at_zero.result), 0, 0};
  if (at_zero.result.verdict == Feasibility::kInfeasible) certify_below(at_zero.separator);
  certify_above(at_zero.result, 0.0);

  int steps = 0;
  while (hi - lo > opt.lambda_tol) {
    const double mid = 0.5 * (lo + hi);
    const double width = hi - lo;
    Probe p = probe(mid);
    ++steps;
    if (p.result.feasible()) {
      hi = mid;
      best = std::move(p.result);
      continue;
    }
    certify_above(p.result, mid);
    if (p.result.verdict == Feasibility::kInfeasible) {
      lo = std::max(lo, mid);
      certify_below(p.separator);
    } else if (hi - lo > 0.75 * width) {
      // Undecided and no certificate helped: treat as infeasible.
      lo = mid;
      ++undecided;
    }
  }
  return ShrinkResult{hi, a.with_target(shrunk_target(b, tu, hi)), std::move(best), steps, undecided};
}

SlotDensity project_onto_intersection(std::span<const double> start, const AffineConstraints& a,
                                      const Box& box, const SolverOptions& opt) {
  const std::size_t m = a.m();
  const double change_tol = opt.dykstra_change_tol_rel / static_cast<double>(m);
  const auto& k = kernels::active();
  std::vector<double> x(start.begin(), start.end());
  std::vector<double> y(m), w(m), next(m);
  std::vector<double> q(m, 0.0);
  SlotDensity out;
  double change = 0.0;
  double residual = 0.0;
  for (int it = 1; it <= opt.max_dykstra_iterations; ++it) {
    // The affine step needs no correction term: its increments are normal to the set.
    a.project(x, y);
    for (std::size_t i = 0; i < m; ++i) w[i] = y[i] + q[i];
    k.clamp(w.data(), box.lo, box.hi, next.data(), m);
    for (std::size_t i = 0; i < m; ++i) q[i] = w[i] - next[i];
    change = k.max_abs_diff(next.data(), x.data(), m);
    x.swap(next);
    residual = a.residual(x);
    if (change <= change_tol && residual <= opt.dykstra_residual_tol) {
      out.iterations = it;
      out.dykstra_gap = k.max_abs_diff(x.data(), y.data(), m);
      out.residual = residual;
      out.mass_error = std::abs(k.sum(x.data(), m) - 1.0);
      out.box_violation = box_violation(x, box);
      out.weights = std::move(x);
      return out;
    }
  }
  std::ostringstream msg;
  msg << "Dykstra projection did not converge in " << opt.max_dykstra_iterations
      << " iterations (last change " << change << ", residual " << residual << ", gap "
      << k.max_abs_diff(x.data(), y.data(), m) << ")";
  throw NumericError(msg.str());
}

SlotDensity proximal_point(const AffineConstraints& a, const Box& box, const SolverOptions& opt) {
  const auto u = uniform_weights(a.m());
  return project_onto_intersection(u, a, box, opt);
}

}  // namespace psyn
