#pragma once

// Monte Carlo experiments: coverage and length of the confidence sets on
// fixed reference designs.
//
// Each design bundles a population process, an estimation spec, a sign
// restriction set, scalar targets, and a grid convention.  A replication
// simulates a sample, estimates the VAR, bootstraps the coefficient
// covariance, evaluates the q-grid, and scores
//   - CS^q coverage at the lower-angle boundary point of the population
//     identified arc (its least favorable point),
//   - CS^theta coverage at the population interval endpoints (the upper
//     endpoint is the least favorable one for these designs),
//   - a chi-squared Wald ellipsoid for the stacked reduced-form
//     coefficients at level 1 - alpha1 - alpha2,
//   - mean set lengths and the mean number of binding inequalities at the
//     scored boundary direction.
// Several (alpha1, alpha2) pairs can be scored in one pass: the moment
// statistic, its simulated draws, and all bootstrap work are shared, only
// the quantile cutoffs differ.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "svarsets/bootstrap.hpp"
#include "svarsets/common.hpp"
#include "svarsets/confidence_sets.hpp"
#include "svarsets/moment_inequality.hpp"
#include "svarsets/restrictions.hpp"
#include "svarsets/rng.hpp"
#include "svarsets/sphere.hpp"
#include "svarsets/stats.hpp"
#include "svarsets/var.hpp"

namespace svarsets {

enum class DesignId { Bivariate1, Bivariate2, Bivariate3, Bivariate4, FourVar };

struct McDesign {
  DesignId id = DesignId::Bivariate1;
  VarProcess process;
  VarSpec spec;
  RestrictionSet restrictions;
  std::vector<ThetaTarget> targets;
  int default_T = 100;
  int default_grid_count = 315;
  bool polar = true;          // 2-d polar grid; otherwise uniform sphere draws
  double grid_lo = -pi / 2.0; // polar angle interval (lo, hi]
  double grid_hi = pi / 2.0;
};

namespace detail {

inline McDesign bivariate_design(DesignId id, const Matrix& sigma_tr, const Matrix& a1,
                                 std::vector<int> horizons) {
  McDesign d;
  d.id = id;
  d.process.sigma_tr = sigma_tr;
  d.process.intercept = Vector::Zero(2);
  const bool var0 = a1.size() == 0;
  if (!var0) d.process.lag_coeffs.push_back(a1);
  d.spec.n = 2;
  d.spec.p = var0 ? 0 : 1;
  d.spec.det = Deterministics::Intercept;
  d.default_T = 100;
  d.polar = true;
  if (var0) {
    // the identified arc lives where the first variable's impact response
    // is nonnegative, so half the circle suffices
    d.grid_lo = -pi / 2.0;
    d.grid_hi = pi / 2.0;
    d.default_grid_count = 315;
  } else {
    d.grid_lo = -pi;
    d.grid_hi = pi;
    d.default_grid_count = 629;
  }
  for (int h : horizons) {
    d.restrictions.signs.push_back({0, h, SignDirection::NonNegative, false});
    d.restrictions.signs.push_back({1, h, SignDirection::NonNegative, false});
  }
  ThetaTarget target;
  target.kind = TargetKind::Irf;
  target.variable = 0;
  target.horizon = horizons.size() == 1 ? horizons.front() : 0;
  target.lower_bound = 0.0;  // the response of variable 1 is sign-restricted
  d.targets.push_back(target);
  return d;
}

}  // namespace detail

// Reference designs.  The default restriction horizons are {0} for the
// lag-free design and {1} for the others; alternative horizon sets (for
// the multi-horizon experiments) may be passed explicitly.
inline McDesign make_design(DesignId id, std::vector<int> horizons = {}) {
  switch (id) {
    case DesignId::Bivariate1: {
      Matrix st(2, 2);
      st << 0.597, 0.0, -0.205, 0.812;
      if (horizons.empty()) horizons = {0};
      for (int h : horizons)
        if (h != 0) throw config_error("make_design: the lag-free design only has impact responses");
      return detail::bivariate_design(id, st, Matrix(), horizons);
    }
    case DesignId::Bivariate2: {
      Matrix st(2, 2), a1(2, 2);
      st << 0.295, 0.0, -0.092, 0.795;
      a1 << 0.873, 0.003, -0.229, 0.230;
      if (horizons.empty()) horizons = {1};
      return detail::bivariate_design(id, st, a1, horizons);
    }
    case DesignId::Bivariate3: {
      Matrix st(2, 2), a1(2, 2);
      st << 0.283, 0.0, -0.081, 0.817;
      a1 << 0.806, 0.032, -0.278, 0.985;
      if (horizons.empty()) horizons = {1};
      return detail::bivariate_design(id, st, a1, horizons);
    }
    case DesignId::Bivariate4: {
      Matrix st(2, 2), a1(2, 2);
      st << 0.210, 0.0, -0.043, 0.542;
      a1 << 0.450, 0.014, 0.060, 0.953;
      if (horizons.empty()) horizons = {1};
      return detail::bivariate_design(id, st, a1, horizons);
    }
    case DesignId::FourVar: {
      if (!horizons.empty())
        throw config_error("make_design: the four-variable design has fixed restriction horizons");
      McDesign d;
      d.id = id;
      Matrix a1t(4, 4), a2t(4, 4), sigma(4, 4);
      a1t << 1.001, -0.100, 0.302, -0.085,
             0.065, 0.585, 0.089, -0.055,
             0.126, 0.284, 1.072, -0.073,
             0.233, 0.141, 0.056, 1.522;
      a2t << -0.080, 0.119, -0.269, 0.078,
             -0.056, 0.262, 0.065, 0.013,
             -0.223, -0.222, -0.178, 0.070,
             -0.230, -0.097, -0.069, -0.538;
      sigma << 0.542, -0.124, 0.199, 0.095,
               -0.124, 1.164, 0.129, -0.369,
               0.199, 0.129, 0.912, -0.263,
               0.095, -0.369, -0.263, 0.549;
      d.process.lag_coeffs = {a1t.transpose(), a2t.transpose()};
      Vector c(4);
      c << 0.626, 0.175, 0.064, 0.204;
      d.process.intercept = c;
      Eigen::LLT<Matrix> llt(sigma);
      if (llt.info() != Eigen::Success)
        throw numeric_error("make_design: innovation covariance is not positive definite");
      d.process.sigma_tr = llt.matrixL();
      d.spec.n = 4;
      d.spec.p = 2;
      d.spec.det = Deterministics::Intercept;
      d.default_T = 170;
      d.default_grid_count = 20000;
      d.polar = false;
      for (int h : {0, 1}) {
        d.restrictions.signs.push_back({1, h, SignDirection::NonPositive, false});
        d.restrictions.signs.push_back({2, h, SignDirection::NonNegative, false});
        d.restrictions.signs.push_back({3, h, SignDirection::NonPositive, false});
      }
      for (int h = 0; h <= 23; ++h) {
        ThetaTarget t;
        t.kind = TargetKind::Irf;
        t.variable = 0;
        t.horizon = h;
        d.targets.push_back(t);
      }
      return d;
    }
  }
  throw config_error("make_design: unknown design");
}

// Population parameters packaged as a (pseudo-)estimate, so the same stack
// machinery evaluates restrictions and targets at the truth.
inline VarEstimate population_estimate(const McDesign& design, int T) {
  VarEstimate est;
  est.spec = design.spec;
  est.lag_coeffs = design.process.lag_coeffs;
  est.sigma_tr = design.process.sigma_tr;
  est.sigma_u = design.process.sigma_tr * design.process.sigma_tr.transpose();
  est.sample_size = T;
  est.det_coeffs = Matrix::Zero(design.spec.n, design.spec.det_terms());
  if (design.spec.det != Deterministics::None) est.det_coeffs.col(0) = design.process.intercept;
  return est;
}

struct PopulationSets {
  // polar-arc endpoints of the identified set of directions (2-d designs)
  double arc_lo = std::numeric_limits<double>::quiet_NaN();
  double arc_hi = std::numeric_limits<double>::quiet_NaN();
  double arc_length = std::numeric_limits<double>::quiet_NaN();
  Vector q_star;                // scored boundary direction (empty if none)
  std::vector<Interval> theta;  // population target intervals, one per target
};

// Closed-form sets for the 2-d designs: each restricted response row r
// admits q angles within a half circle centered on the row's own angle, so
// the identified arc is [max_r angle(r) - pi/2, min_r angle(r) + pi/2] and
// target ranges follow from the cosine shape of theta along the arc.
// The four-variable design is handled by a dense uniform grid.
inline PopulationSets population_sets(const McDesign& design, int grid_count = 200000,
                                      std::uint64_t grid_seed = 0x9a7e11ULL) {
  PopulationSets pop;
  const VarEstimate est = population_estimate(design, design.default_T);
  const ReducedFormStack stack = build_phi(est, design.restrictions, design.targets);

  if (design.spec.n == 2) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    const auto rows = detail::response_rows(est, stack.max_horizon);
    for (const auto& s : design.restrictions.signs) {
      Vector r = rows.get(s.horizon, s.cumulative).row(s.variable).transpose();
      if (s.direction == SignDirection::NonPositive) r = -r;
      const double angle = std::atan2(r(1), r(0));
      lo = std::max(lo, angle - pi / 2.0);
      hi = std::min(hi, angle + pi / 2.0);
    }
    if (!(hi > lo)) throw numeric_error("population_sets: identified arc is empty");
    pop.arc_lo = lo;
    pop.arc_hi = hi;
    pop.arc_length = hi - lo;
    pop.q_star = Vector(2);
    pop.q_star << std::cos(lo), std::sin(lo);

    for (std::size_t t = 0; t < design.targets.size(); ++t) {
      if (design.targets[t].kind == TargetKind::VarianceShare)
        throw config_error("population_sets: variance-share targets are not scored");
      const bool cum = design.targets[t].kind == TargetKind::CumulativeIrf;
      const Vector row =
          rows.get(design.targets[t].horizon, cum).row(design.targets[t].variable).transpose();
      const double amp = row.norm();
      const double phase = std::atan2(row(1), row(0));
      // theta(angle) = amp * cos(angle - phase) on [lo, hi]
      auto wrapped_in_arc = [&](double a) {
        for (int k = -1; k <= 1; ++k)
          if (lo <= a + 2.0 * pi * k && a + 2.0 * pi * k <= hi) return true;
        return false;
      };
      const double at_lo = amp * std::cos(lo - phase);
      const double at_hi = amp * std::cos(hi - phase);
      double tmin = std::min(at_lo, at_hi);
      double tmax = std::max(at_lo, at_hi);
      if (wrapped_in_arc(phase)) tmax = amp;
      if (wrapped_in_arc(phase + pi)) tmin = -amp;
      pop.theta.push_back(Interval::make(tmin, tmax));
    }
    return pop;
  }

  // dense-grid evaluation for higher dimensions
  const QGrid grid = make_uniform_grid(design.spec.n, grid_count, grid_seed);
  std::vector<double> lo(design.targets.size(), std::numeric_limits<double>::infinity());
  std::vector<double> hi(design.targets.size(), -std::numeric_limits<double>::infinity());
  int feasible = 0;
  for (int i = 0; i < grid.count(); ++i) {
    const Vector q = grid.points.row(i).transpose();
    const Matrix st = stilde(stack, q);
    if (!((st * stack.phi_q).array() >= 0.0).all()) continue;
    ++feasible;
    for (std::size_t t = 0; t < design.targets.size(); ++t) {
      const double v = theta_value(stack, static_cast<int>(t), q);
      lo[t] = std::min(lo[t], v);
      hi[t] = std::max(hi[t], v);
    }
  }
  if (feasible == 0) throw numeric_error("population_sets: no feasible direction on the grid");
  for (std::size_t t = 0; t < design.targets.size(); ++t)
    pop.theta.push_back(Interval::make(lo[t], hi[t]));
  return pop;
}

struct AlphaPair {
  double alpha1 = 0.05;
  double alpha2 = 0.05;
};

struct McConfig {
  int T = 0;           // 0: design default
  int n_sim = 500;
  double alpha1 = 0.05;
  double alpha2 = 0.05;
  int n_lambda = 1000;
  int n_q = 0;         // 0: design default
  int n_z = 0;         // 0: 500 for bivariate designs, 1000 otherwise
  std::uint64_t seed = 1;
  int threads = 1;
  int population_grid_count = 200000;  // population sets of the 4-d design
  MomentOptions moment{};
};

struct ThetaScore {
  int target = 0;
  Interval population;          // population identified interval
  double cov_low = 0.0;         // CS^theta coverage of the lower endpoint
  double cov_high = 0.0;        // ... and of the upper (least favorable) one
  double mean_cs_length = 0.0;  // over replications with non-empty CS^q
  double mean_fhat_length = 0.0;
};

struct McResult {
  DesignId design = DesignId::Bivariate1;
  int T = 0;
  int n_sim = 0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  int n_empty_cs = 0;    // replications with empty CS^q
  int n_empty_fhat = 0;  // replications with empty plug-in set

  double cov_q = std::numeric_limits<double>::quiet_NaN();    // at q_star (polar only)
  double cov_phi = 0.0;                                       // Wald ellipsoid
  double mean_arc_cs = std::numeric_limits<double>::quiet_NaN();   // radians
  double mean_arc_fhat = std::numeric_limits<double>::quiet_NaN(); // radians
  double mean_binding_qstar = std::numeric_limits<double>::quiet_NaN();
  std::vector<ThetaScore> theta;
};

inline double mc_standard_error(double p, int n_sim) {
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n_sim));
}

// Score several (alpha1, alpha2) pairs in one replication pass.
inline std::vector<McResult> run_experiment_pairs(const McDesign& design, const McConfig& cfg,
                                                  const std::vector<AlphaPair>& pairs) {
  if (pairs.empty()) throw config_error("run_experiment: need at least one alpha pair");
  for (const auto& p : pairs) {
    if (p.alpha1 <= 0.0 || p.alpha1 >= 1.0 || p.alpha2 <= 0.0 || p.alpha2 >= 1.0 ||
        p.alpha1 + p.alpha2 >= 1.0)
      throw config_error("run_experiment: alpha levels must be positive with alpha1+alpha2 < 1");
  }
  if (cfg.n_sim < 1) throw config_error("run_experiment: n_sim must be positive");

  const int T = cfg.T > 0 ? cfg.T : design.default_T;
  const int n_q = cfg.n_q > 0 ? cfg.n_q : design.default_grid_count;
  const int n_z = cfg.n_z > 0 ? cfg.n_z : (design.spec.n == 2 ? 500 : 1000);
  const std::size_t np = pairs.size();
  const std::size_t nt = design.targets.size();

  const PopulationSets pop = population_sets(design, cfg.population_grid_count);
  const QGrid grid = design.polar
                         ? make_polar_grid(n_q, design.grid_lo, design.grid_hi)
                         : make_uniform_grid(design.spec.n, n_q, derive_seed(cfg.seed, {0x96dULL}));

  const VarEstimate est_pop = population_estimate(design, T);
  const ReducedFormStack stack_pop = build_phi(est_pop, design.restrictions, design.targets);
  const Vector phi_pop = stack_pop.phi_q;
  const int m = stack_pop.m();

  std::vector<double> alpha1s(np);
  std::vector<double> chi2_crit(np);
  for (std::size_t i = 0; i < np; ++i) {
    alpha1s[i] = pairs[i].alpha1;
    chi2_crit[i] = chi2_quantile(1.0 - pairs[i].alpha1 - pairs[i].alpha2, m);
  }

  // accumulators [pair] / [pair][target]
  std::vector<int> cov_q(np, 0), cov_phi(np, 0), empty_cs(np, 0);
  std::vector<double> arc_cs(np, 0.0);
  std::vector<std::vector<int>> cov_lo(np, std::vector<int>(nt, 0));
  std::vector<std::vector<int>> cov_hi(np, std::vector<int>(nt, 0));
  std::vector<std::vector<double>> len_cs(np, std::vector<double>(nt, 0.0));
  int empty_fhat = 0;
  double arc_fhat = 0.0;
  std::vector<double> len_fhat(nt, 0.0);
  double binding_sum = 0.0;

  std::vector<double> z2(np);
  for (std::size_t i = 0; i < np; ++i) z2[i] = normal_quantile(1.0 - pairs[i].alpha2 / 2.0);

  for (int rep = 0; rep < cfg.n_sim; ++rep) {
    const std::uint64_t r = static_cast<std::uint64_t>(rep);
    Rng sim_rng = derive_rng(cfg.seed, {0x3c0ULL, r});
    TimeSeriesData data;
    data.values = simulate_var(design.process, T, sim_rng);
    const VarEstimate est = estimate_ols(data, design.spec);

    ReducedFormStack stack = build_phi(est, design.restrictions, design.targets);
    BootstrapConfig bcfg;
    bcfg.n_lambda = cfg.n_lambda;
    bcfg.seed = derive_seed(cfg.seed, {0xb00ULL, r});
    bcfg.threads = cfg.threads;
    bootstrap_lambda(stack, est, bcfg);

    Rng panel_rng = derive_rng(cfg.seed, {0x5a1ULL, r});
    const Matrix panel = draw_panel(n_z, m, panel_rng);

    // grid pass
    std::vector<char> fhat(static_cast<std::size_t>(grid.count()), 0);
    std::vector<std::vector<char>> member(np,
                                          std::vector<char>(static_cast<std::size_t>(grid.count()), 0));
    Matrix theta_vals(static_cast<Eigen::Index>(nt), grid.count());
    Matrix theta_sds(static_cast<Eigen::Index>(nt), grid.count());
    for (int i = 0; i < grid.count(); ++i) {
      const Vector q = grid.points.row(i).transpose();
      const QPointEvalMulti e = evaluate_point_multi(stack, q, panel, alpha1s, cfg.moment);
      fhat[static_cast<std::size_t>(i)] = e.in_fhat ? 1 : 0;
      for (std::size_t a = 0; a < np; ++a)
        member[a][static_cast<std::size_t>(i)] = e.g <= e.c[a] ? 1 : 0;
      for (std::size_t t = 0; t < nt; ++t) {
        theta_vals(static_cast<Eigen::Index>(t), i) = theta_value(stack, static_cast<int>(t), q);
        theta_sds(static_cast<Eigen::Index>(t), i) = theta_sd(stack, static_cast<int>(t), q);
      }
    }

    // boundary-point scoring (polar designs)
    if (pop.q_star.size() == design.spec.n) {
      const QPointEvalMulti e_star =
          evaluate_point_multi(stack, pop.q_star, panel, alpha1s, cfg.moment);
      for (std::size_t a = 0; a < np; ++a) cov_q[a] += e_star.g <= e_star.c[a] ? 1 : 0;
      binding_sum += static_cast<double>(e_star.r1);
    }

    // reduced-form Wald ellipsoid
    const Vector diff = stack.phi_q - phi_pop;
    const double wald = static_cast<double>(T) *
                        diff.dot(stack.lambda_qq.llt().solve(diff));
    for (std::size_t a = 0; a < np; ++a) cov_phi[a] += wald <= chi2_crit[a] ? 1 : 0;

    // plug-in set summaries (alpha-independent)
    int fhat_count = 0;
    for (char f : fhat) fhat_count += f;
    if (fhat_count == 0) {
      ++empty_fhat;
    } else {
      if (grid.spacing) arc_fhat += static_cast<double>(fhat_count) * *grid.spacing;
      for (std::size_t t = 0; t < nt; ++t) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < grid.count(); ++i) {
          if (!fhat[static_cast<std::size_t>(i)]) continue;
          lo = std::min(lo, theta_vals(static_cast<Eigen::Index>(t), i));
          hi = std::max(hi, theta_vals(static_cast<Eigen::Index>(t), i));
        }
        len_fhat[t] += hi - lo;
      }
    }

    // per-pair confidence sets
    for (std::size_t a = 0; a < np; ++a) {
      int cs_count = 0;
      for (char mflag : member[a]) cs_count += mflag;
      if (cs_count == 0) {
        ++empty_cs[a];
        continue;  // theta coverage at this replication: missed
      }
      if (grid.spacing) arc_cs[a] += static_cast<double>(cs_count) * *grid.spacing;
      for (std::size_t t = 0; t < nt; ++t) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < grid.count(); ++i) {
          if (!member[a][static_cast<std::size_t>(i)]) continue;
          const double center = theta_vals(static_cast<Eigen::Index>(t), i);
          const double spread = z2[a] * theta_sds(static_cast<Eigen::Index>(t), i);
          lo = std::min(lo, center - spread);
          hi = std::max(hi, center + spread);
        }
        Interval band = detail::truncate(Interval::make(lo, hi),
                                         stack.targets[t]);
        if (band.contains(pop.theta[t].lo)) ++cov_lo[a][t];
        if (band.contains(pop.theta[t].hi)) ++cov_hi[a][t];
        len_cs[a][t] += band.length();
      }
    }
  }

  const double n_sim_f = static_cast<double>(cfg.n_sim);
  std::vector<McResult> results(np);
  for (std::size_t a = 0; a < np; ++a) {
    McResult& res = results[a];
    res.design = design.id;
    res.T = T;
    res.n_sim = cfg.n_sim;
    res.alpha1 = pairs[a].alpha1;
    res.alpha2 = pairs[a].alpha2;
    res.n_empty_cs = empty_cs[a];
    res.n_empty_fhat = empty_fhat;
    res.cov_phi = static_cast<double>(cov_phi[a]) / n_sim_f;
    const int nonempty = cfg.n_sim - empty_cs[a];
    if (pop.q_star.size() == design.spec.n) {
      res.cov_q = static_cast<double>(cov_q[a]) / n_sim_f;
      res.mean_binding_qstar = binding_sum / n_sim_f;
    }
    if (grid.spacing) {
      if (nonempty > 0) res.mean_arc_cs = arc_cs[a] / static_cast<double>(nonempty);
      if (cfg.n_sim > empty_fhat)
        res.mean_arc_fhat = arc_fhat / static_cast<double>(cfg.n_sim - empty_fhat);
    }
    res.theta.resize(nt);
    for (std::size_t t = 0; t < nt; ++t) {
      ThetaScore& sc = res.theta[t];
      sc.target = static_cast<int>(t);
      sc.population = pop.theta[t];
      sc.cov_low = static_cast<double>(cov_lo[a][t]) / n_sim_f;
      sc.cov_high = static_cast<double>(cov_hi[a][t]) / n_sim_f;
      if (nonempty > 0) sc.mean_cs_length = len_cs[a][t] / static_cast<double>(nonempty);
      if (cfg.n_sim > empty_fhat)
        sc.mean_fhat_length = len_fhat[t] / static_cast<double>(cfg.n_sim - empty_fhat);
    }
  }
  return results;
}

inline McResult run_experiment(const McDesign& design, const McConfig& cfg) {
  return run_experiment_pairs(design, cfg, {{cfg.alpha1, cfg.alpha2}}).front();
}

enum class SweepMode {
  FixTotal,   // values are alpha1 levels; alpha2 = (alpha1+alpha2) - value
  FixAlpha1,  // values are alpha2 levels; alpha1 = cfg.alpha1
};

inline std::vector<McResult> alpha_sweep(const McDesign& design, const McConfig& cfg,
                                         SweepMode mode, const std::vector<double>& values) {
  if (values.empty()) throw config_error("alpha_sweep: need at least one level");
  std::vector<AlphaPair> pairs;
  pairs.reserve(values.size());
  for (double v : values) {
    AlphaPair p;
    if (mode == SweepMode::FixTotal) {
      const double total = cfg.alpha1 + cfg.alpha2;
      p.alpha1 = v;
      p.alpha2 = total - v;
    } else {
      p.alpha1 = cfg.alpha1;
      p.alpha2 = v;
    }
    pairs.push_back(p);
  }
  return run_experiment_pairs(design, cfg, pairs);
}

}  // namespace svarsets
