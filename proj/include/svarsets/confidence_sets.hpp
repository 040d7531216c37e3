#pragma once

// Confidence sets for the impact direction and for scalar responses.
//
// CS^q is the level set {q on the grid : G(q) <= c^{alpha1}(q)} of the
// moment-inequality statistic; the plug-in estimate Fhat^q keeps the grid
// points whose restricted responses all have the required signs at the
// point estimate.  Fhat^q is a subset of CS^q by construction.
//
// Scalar bands use the Bonferroni split: a 1-alpha1 set for q, then for
// every q in CS^q a two-sided 1-alpha2 Wald interval for theta(q) with
// sigma(q) = sqrt(q' Lambda_theta q / T), and finally the union hull
//   CS^theta = Theta  ∩  [min_q lower(q), max_q upper(q)].
// An empty CS^q yields an explicitly empty band: the data reject the sign
// restrictions at every candidate direction, which is reported rather than
// treated as an error.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "svarsets/common.hpp"
#include "svarsets/moment_inequality.hpp"
#include "svarsets/parallel.hpp"
#include "svarsets/restrictions.hpp"
#include "svarsets/rng.hpp"
#include "svarsets/sphere.hpp"
#include "svarsets/stats.hpp"

namespace svarsets {

struct CsQConfig {
  double alpha1 = 0.05;
  int n_z = 500;                     // critical-value simulation draws
  std::uint64_t seed = 0;            // stream for the simulation panel
  bool share_draws_across_q = true;  // one panel reused at every grid point
  MomentOptions moment{};
  int threads = 1;
  // statistics below this are snapped to exactly zero so that interior
  // points stay inside the level set even when the critical value is zero
  double g_snap_tol = 1e-12;
};

struct QPointEval {
  double g = 0.0;        // moment objective
  double c = 0.0;        // simulated critical value
  bool in_fhat = false;  // all restricted responses have the required sign
  bool in_cs = false;    // g <= c
  int r1 = 0;            // binding moments entering the critical value
};

struct QGridResult {
  QGrid grid;
  std::vector<QPointEval> evals;
  double alpha1 = 0.0;
  int fhat_count = 0;
  int cs_count = 0;

  bool cs_empty() const { return cs_count == 0; }
  bool fhat_empty() const { return fhat_count == 0; }

  // total arc length of a membership set; defined for polar grids only
  std::optional<double> arc_length(bool of_cs) const {
    if (!grid.spacing) return std::nullopt;
    return static_cast<double>(of_cs ? cs_count : fhat_count) * *grid.spacing;
  }
};

// One direction evaluated at several alpha1 levels from a shared panel;
// levels share the statistic, the selection, and the simulated draws.
struct QPointEvalMulti {
  double g = 0.0;
  std::vector<double> c;
  bool in_fhat = false;
  int r1 = 0;
};

inline QPointEvalMulti evaluate_point_multi(const ReducedFormStack& stack, const Vector& q,
                                            const Matrix& panel,
                                            const std::vector<double>& alpha1s,
                                            const MomentOptions& opts = {},
                                            double g_snap_tol = 1e-12) {
  QPointEvalMulti out;
  MomentDiagnostics diag;
  double g = objective_g(stack, q, opts, &diag);
  if (g < g_snap_tol) g = 0.0;
  out.g = g;
  out.c = critical_values(diag, panel, alpha1s, opts);
  out.r1 = diag.r1;
  const Matrix st = stilde(stack, q);
  out.in_fhat = st.rows() == 0 || ((st * stack.phi_q).array() >= 0.0).all();
  return out;
}

// Evaluate one direction against a given simulation panel (n_z x m).
inline QPointEval evaluate_point(const ReducedFormStack& stack, const Vector& q,
                                 const Matrix& panel, double alpha1,
                                 const MomentOptions& opts = {}, double g_snap_tol = 1e-12) {
  const QPointEvalMulti multi =
      evaluate_point_multi(stack, q, panel, {alpha1}, opts, g_snap_tol);
  QPointEval out;
  out.g = multi.g;
  out.c = multi.c.front();
  out.in_fhat = multi.in_fhat;
  out.in_cs = multi.g <= out.c;
  out.r1 = multi.r1;
  return out;
}

inline QGridResult cs_q(const ReducedFormStack& stack, const QGrid& grid,
                        const CsQConfig& cfg = {}) {
  if (!stack.has_lambda()) throw config_error("cs_q: stack carries no bootstrap covariance");
  if (grid.count() == 0) throw config_error("cs_q: empty grid");
  if (grid.n() != stack.n) throw config_error("cs_q: grid dimension does not match the system");
  if (cfg.alpha1 <= 0.0 || cfg.alpha1 >= 1.0) throw config_error("cs_q: alpha1 must lie in (0, 1)");

  QGridResult out;
  out.grid = grid;
  out.alpha1 = cfg.alpha1;
  out.evals.resize(static_cast<std::size_t>(grid.count()));

  Matrix shared;
  if (cfg.share_draws_across_q) shared = draw_panel(cfg.n_z, stack.m(), cfg.seed);

  parallel_for(static_cast<std::size_t>(grid.count()), [&](std::size_t i) {
    const Vector q = grid.points.row(static_cast<Eigen::Index>(i)).transpose();
    if (cfg.share_draws_across_q) {
      out.evals[i] = evaluate_point(stack, q, shared, cfg.alpha1, cfg.moment, cfg.g_snap_tol);
    } else {
      Rng rng = derive_rng(cfg.seed, {0xc217u, static_cast<std::uint64_t>(i)});
      const Matrix local = draw_panel(cfg.n_z, stack.m(), rng);
      out.evals[i] = evaluate_point(stack, q, local, cfg.alpha1, cfg.moment, cfg.g_snap_tol);
    }
  }, cfg.threads);

  for (const auto& e : out.evals) {
    out.fhat_count += e.in_fhat ? 1 : 0;
    out.cs_count += e.in_cs ? 1 : 0;
  }
  return out;
}

// A possibly-empty closed interval.
struct Interval {
  double lo = std::numeric_limits<double>::quiet_NaN();
  double hi = std::numeric_limits<double>::quiet_NaN();
  bool empty = true;

  double length() const { return empty ? 0.0 : hi - lo; }
  bool contains(double x) const { return !empty && lo <= x && x <= hi; }

  static Interval make(double lo, double hi) {
    Interval iv;
    if (hi >= lo) {
      iv.lo = lo;
      iv.hi = hi;
      iv.empty = false;
    }
    return iv;
  }
};

namespace detail {

inline Interval truncate(Interval iv, const ThetaTarget& t) {
  if (iv.empty) return iv;
  double lo = iv.lo;
  double hi = iv.hi;
  if (t.lower_bound) lo = std::max(lo, *t.lower_bound);
  if (t.upper_bound) hi = std::min(hi, *t.upper_bound);
  return Interval::make(lo, hi);
}

}  // namespace detail

// Plug-in estimate of the identified set for one target: the range of
// theta(q) over the grid points satisfying the restrictions exactly.
inline Interval estimated_identified_set_theta(const ReducedFormStack& stack,
                                               const QGridResult& grid_result, int target) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < grid_result.evals.size(); ++i) {
    if (!grid_result.evals[i].in_fhat) continue;
    const Vector q = grid_result.grid.points.row(static_cast<Eigen::Index>(i)).transpose();
    const double v = theta_value(stack, target, q);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    any = true;
  }
  if (!any) return Interval{};
  return Interval::make(lo, hi);
}

// Delta-method standard deviation of theta(q) at fixed q.
inline double theta_sd(const ReducedFormStack& stack, int target, const Vector& q) {
  if (target < 0 || target >= static_cast<int>(stack.targets.size()))
    throw config_error("theta_sd: target index out of range");
  if (static_cast<std::size_t>(target) >= stack.lambda_theta.size())
    throw config_error("theta_sd: stack carries no target covariance");
  const Matrix& lam = stack.lambda_theta[static_cast<std::size_t>(target)];
  const ThetaTarget& t = stack.targets[static_cast<std::size_t>(target)];
  Vector grad;
  if (t.kind == TargetKind::VarianceShare) {
    // theta = (s'q)^2 / (s's) with s the target variable's row of sigma_tr;
    // gradient with respect to s
    const Vector s = stack.sigma_tr.row(t.variable).transpose();
    const double den = s.squaredNorm();
    if (den <= 0.0) throw numeric_error("theta_sd: zero innovation variance");
    const double num = s.dot(q);
    grad = (2.0 * num / den) * q - (2.0 * num * num / (den * den)) * s;
  } else {
    grad = q;  // theta = phi_theta' q is linear
  }
  double var = grad.dot(lam * grad) / static_cast<double>(stack.sample_size);
  // lam is PSD by construction; tolerate rounding just below zero
  if (var < 0.0) {
    if (var < -1e-12 * (1.0 + lam.norm())) throw numeric_error("theta_sd: negative variance");
    var = 0.0;
  }
  return std::sqrt(var);
}

// Two-sided Wald interval for theta(q) at one direction, intersected with
// any parameter-space bounds on the target.
inline Interval wald_theta(const ReducedFormStack& stack, int target, const Vector& q,
                           double alpha2) {
  if (alpha2 <= 0.0 || alpha2 >= 1.0) throw config_error("wald_theta: alpha2 must lie in (0, 1)");
  const double z = normal_quantile(1.0 - alpha2 / 2.0);
  const double center = theta_value(stack, target, q);
  const double sd = theta_sd(stack, target, q);
  return detail::truncate(Interval::make(center - z * sd, center + z * sd),
                          stack.targets[static_cast<std::size_t>(target)]);
}

// Bonferroni band for one target: union hull of the per-q Wald intervals
// over CS^q, intersected with the target's bounds.
inline Interval bonferroni_theta(const ReducedFormStack& stack, const QGridResult& grid_result,
                                 int target, double alpha2) {
  if (alpha2 <= 0.0 || alpha2 >= 1.0)
    throw config_error("bonferroni_theta: alpha2 must lie in (0, 1)");
  const double z = normal_quantile(1.0 - alpha2 / 2.0);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < grid_result.evals.size(); ++i) {
    if (!grid_result.evals[i].in_cs) continue;
    const Vector q = grid_result.grid.points.row(static_cast<Eigen::Index>(i)).transpose();
    const double center = theta_value(stack, target, q);
    const double sd = theta_sd(stack, target, q);
    lo = std::min(lo, center - z * sd);
    hi = std::max(hi, center + z * sd);
    any = true;
  }
  if (!any) return Interval{};
  return detail::truncate(Interval::make(lo, hi),
                          stack.targets[static_cast<std::size_t>(target)]);
}

// Per-horizon bands for one variable's responses, reusing a single CS^q.
// Entry h of the result pairs the plug-in set with the Bonferroni band for
// the target at index target_offset + h in the stack's target list; the
// caller lays the targets out contiguously by horizon.
struct BandPoint {
  Interval fhat;
  Interval cs;
};

inline std::vector<BandPoint> irf_band(const ReducedFormStack& stack,
                                       const QGridResult& grid_result, int target_offset,
                                       int horizon_count, double alpha2) {
  if (target_offset < 0 || horizon_count < 1 ||
      target_offset + horizon_count > static_cast<int>(stack.targets.size()))
    throw config_error("irf_band: target range out of bounds");
  std::vector<BandPoint> band(static_cast<std::size_t>(horizon_count));
  for (int h = 0; h < horizon_count; ++h) {
    band[static_cast<std::size_t>(h)].fhat =
        estimated_identified_set_theta(stack, grid_result, target_offset + h);
    band[static_cast<std::size_t>(h)].cs =
        bonferroni_theta(stack, grid_result, target_offset + h, alpha2);
  }
  return band;
}

}  // namespace svarsets
