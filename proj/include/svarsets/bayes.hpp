#pragma once

// Bayesian comparison bands via an acceptance sampler.
//
// Under the improper prior proportional to |Sigma|^{-(n+1)/2}, the
// reduced-form posterior is sampled as
//   Sigma | Y  ~  inverse-Wishart(scale T * Sigma_hat, T d.o.f.)
//   A | Sigma, Y  ~  matric-normal centered at the OLS coefficients with
//                    row covariance (X'X)^{-1} and column covariance Sigma
// (the standard conjugate form used with Uhlig-style sign-restriction
// samplers).  Each proposal pairs a posterior (A, Sigma) draw with a
// uniform impact direction q; the draw is accepted iff every sign
// restriction holds at the drawn parameters.  Credible bands are pointwise
// equal-tailed quantile intervals across accepted impulse-response paths.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "svarsets/common.hpp"
#include "svarsets/confidence_sets.hpp"
#include "svarsets/restrictions.hpp"
#include "svarsets/rng.hpp"
#include "svarsets/sphere.hpp"
#include "svarsets/stats.hpp"
#include "svarsets/var.hpp"

namespace svarsets {

struct BayesConfig {
  int n_draws = 1000;                          // accepted draws requested
  int horizon = 0;                             // impulse responses stored to this horizon
  std::uint64_t seed = 0;
  std::uint64_t max_attempts = 10'000'000;     // total proposal cap
  std::uint64_t acceptance_check_at = 100'000; // early-abort checkpoint
  double min_acceptance = 1e-4;                // abort threshold at the checkpoint
};

struct PosteriorDraw {
  Vector q;         // accepted impact direction (unit norm)
  Matrix sigma_tr;  // Cholesky factor of the Sigma draw
  Matrix irf;       // n x (horizon + 1) structural responses
};

struct BayesResult {
  std::vector<PosteriorDraw> draws;
  std::uint64_t attempts = 0;
  bool hit_attempt_cap = false;

  double acceptance_rate() const {
    return attempts == 0 ? 0.0
                         : static_cast<double>(draws.size()) / static_cast<double>(attempts);
  }
};

namespace detail {

// Bartlett draw from Wishart(S, dof) with S = C C': M = C A, W = M M'.
inline Matrix draw_wishart_factor(const Matrix& c_factor, int dof, Rng& rng) {
  const int n = static_cast<int>(c_factor.rows());
  if (dof < n) throw config_error("draw_wishart_factor: degrees of freedom below dimension");
  Matrix a = Matrix::Zero(n, n);
  std::normal_distribution<double> normal;
  for (int i = 0; i < n; ++i) {
    std::chi_squared_distribution<double> chi2(static_cast<double>(dof - i));
    a(i, i) = std::sqrt(chi2(rng));
    for (int j = 0; j < i; ++j) a(i, j) = normal(rng);
  }
  return c_factor * a;  // W = (CA)(CA)'
}

// Inverse-Wishart(scale, dof) draw returned through its Cholesky factor.
inline Matrix draw_inverse_wishart_chol(const Matrix& scale, int dof, Rng& rng) {
  const int n = static_cast<int>(scale.rows());
  Eigen::LLT<Matrix> llt(scale);
  if (llt.info() != Eigen::Success)
    throw numeric_error("draw_inverse_wishart: scale matrix is not positive definite");
  const Matrix l_scale = llt.matrixL();
  // W ~ Wishart(scale^{-1}, dof) via factor C = L^{-T}; Sigma = W^{-1}
  const Matrix c_factor = l_scale.transpose()
                              .triangularView<Eigen::Upper>()
                              .solve(Matrix::Identity(n, n));
  const Matrix m = draw_wishart_factor(c_factor, dof, rng);
  const Matrix w = m * m.transpose();
  Eigen::LLT<Matrix> llt_w(w);
  if (llt_w.info() != Eigen::Success)
    throw numeric_error("draw_inverse_wishart: degenerate Wishart draw");
  const Matrix l_w = llt_w.matrixL();
  // Sigma = W^{-1} = L_w^{-T} L_w^{-1}; its Cholesky factor solves
  // L_sigma = (L_w^{-1})' reordered -- compute Sigma then factor (n is tiny)
  const Matrix sigma =
      llt_w.solve(Matrix::Identity(n, n));
  Eigen::LLT<Matrix> llt_s((sigma + sigma.transpose()) / 2.0);
  if (llt_s.info() != Eigen::Success)
    throw numeric_error("draw_inverse_wishart: draw is not positive definite");
  return llt_s.matrixL();
}

// Matric-normal draw B = center + Lrow Z Lcol' with Lrow Lrow' the row
// covariance and Lcol Lcol' the column covariance.
inline Matrix draw_matric_normal(const Matrix& center, const Matrix& l_row,
                                 const Matrix& l_col, Rng& rng) {
  const Matrix z = gaussian_matrix(static_cast<int>(center.rows()),
                                   static_cast<int>(center.cols()), rng);
  return center + l_row * z * l_col.transpose();
}

}  // namespace detail

// Draw from the reduced-form posterior and keep proposals whose sign
// restrictions hold at a uniformly drawn impact direction.
inline BayesResult posterior_sample(const TimeSeriesData& data, const VarSpec& spec,
                                    const RestrictionSet& restr, const BayesConfig& cfg = {}) {
  if (cfg.n_draws < 1) throw config_error("posterior_sample: n_draws must be positive");
  if (cfg.horizon < 0) throw config_error("posterior_sample: horizon must be >= 0");
  if (!restr.signs.empty()) {
    restr.validate(spec.n);
  } else if (restr.zero_count < 0 || restr.zero_count >= spec.n) {
    throw config_error("restrictions: zero_count must lie in [0, n)");
  }

  const VarEstimate est = estimate_ols(data, spec);
  const auto design = detail::regression_design(data, spec);
  const int n = spec.n;
  const int t_post = est.sample_size;  // posterior degrees of freedom
  const Matrix scale = static_cast<double>(t_post) * est.sigma_u;

  Eigen::LLT<Matrix> llt_xx(design.x.transpose() * design.x);
  if (llt_xx.info() != Eigen::Success)
    throw numeric_error("posterior_sample: X'X is not positive definite");
  const Matrix l_xx = llt_xx.matrixL();
  // row covariance (X'X)^{-1} has factor L_xx^{-T}
  const Matrix l_row = l_xx.transpose()
                           .triangularView<Eigen::Upper>()
                           .solve(Matrix::Identity(l_xx.rows(), l_xx.cols()));

  // OLS coefficient matrix in regression layout (k x n)
  Matrix b_hat(spec.regressors(), n);
  const int d = spec.det_terms();
  if (d > 0) b_hat.topRows(d) = est.det_coeffs.transpose();
  for (int lag = 0; lag < spec.p; ++lag)
    b_hat.middleRows(d + lag * n, n) = est.lag_coeffs[static_cast<std::size_t>(lag)].transpose();

  const int check_h = restr.max_horizon();
  const int full_h = std::max(cfg.horizon, check_h);
  const int qdim = restricted_domain_dim(n, restr.zero_count);

  BayesResult result;
  result.draws.reserve(static_cast<std::size_t>(cfg.n_draws));

  for (std::uint64_t attempt = 0;
       result.draws.size() < static_cast<std::size_t>(cfg.n_draws); ++attempt) {
    if (attempt >= cfg.max_attempts) {
      result.hit_attempt_cap = true;
      break;
    }
    if (attempt == cfg.acceptance_check_at &&
        static_cast<double>(result.draws.size()) < cfg.min_acceptance * static_cast<double>(attempt)) {
      throw numeric_error(
          "posterior_sample: acceptance rate below " + std::to_string(cfg.min_acceptance) +
          " after " + std::to_string(attempt) +
          " proposals; the sign restrictions appear inconsistent with the posterior");
    }
    result.attempts = attempt + 1;
    Rng rng = derive_rng(cfg.seed, {0xba7e5u, attempt});

    const Matrix sigma_tr = detail::draw_inverse_wishart_chol(scale, t_post, rng);
    const Matrix b = detail::draw_matric_normal(b_hat, l_row, sigma_tr, rng);

    std::vector<Matrix> lags;
    lags.reserve(static_cast<std::size_t>(spec.p));
    for (int lag = 0; lag < spec.p; ++lag)
      lags.push_back(b.middleRows(d + lag * n, n).transpose());

    // uniform direction on the (restricted) sphere
    Vector q_red = gaussian_vector(qdim, rng);
    double norm = q_red.norm();
    while (norm < 1e-12) {
      q_red = gaussian_vector(qdim, rng);
      norm = q_red.norm();
    }
    q_red /= norm;
    Vector q = Vector::Zero(n);
    q.tail(qdim) = q_red;

    const auto vma = vma_coefficients(lags, n, full_h);
    const Vector impact = sigma_tr * q;

    bool ok = true;
    for (const auto& s : restr.signs) {
      double value = 0.0;
      if (s.cumulative) {
        for (int h = 0; h <= s.horizon; ++h) value += vma[static_cast<std::size_t>(h)].row(s.variable) * impact;
      } else {
        value = vma[static_cast<std::size_t>(s.horizon)].row(s.variable) * impact;
      }
      if (s.direction == SignDirection::NonPositive) value = -value;
      if (value < 0.0) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;

    PosteriorDraw draw;
    draw.q = q;
    draw.sigma_tr = sigma_tr;
    draw.irf.resize(n, cfg.horizon + 1);
    for (int h = 0; h <= cfg.horizon; ++h)
      draw.irf.col(h) = vma[static_cast<std::size_t>(h)] * impact;
    result.draws.push_back(std::move(draw));
  }
  return result;
}

// Pointwise equal-tailed credible intervals for one variable's responses
// (plain or cumulative) across accepted draws, one interval per horizon.
inline std::vector<Interval> credible_band(const std::vector<PosteriorDraw>& draws,
                                           TargetKind kind, int variable, double level,
                                           int min_draws = 100) {
  if (level <= 0.0 || level > 1.0) throw config_error("credible_band: level must lie in (0, 1]");
  if (static_cast<int>(draws.size()) < min_draws)
    throw config_error("credible_band: need at least " + std::to_string(min_draws) +
                       " accepted draws, have " + std::to_string(draws.size()));
  const int n = static_cast<int>(draws.front().irf.rows());
  if (variable < 0 || variable >= n) throw config_error("credible_band: variable out of range");
  const int horizons = kind == TargetKind::VarianceShare
                           ? 1
                           : static_cast<int>(draws.front().irf.cols());
  const double tail = (1.0 - level) / 2.0;

  std::vector<Interval> band(static_cast<std::size_t>(horizons));
  std::vector<double> values(draws.size());
  for (int h = 0; h < horizons; ++h) {
    for (std::size_t i = 0; i < draws.size(); ++i) {
      const PosteriorDraw& dr = draws[i];
      double v = 0.0;
      switch (kind) {
        case TargetKind::Irf:
          v = dr.irf(variable, h);
          break;
        case TargetKind::CumulativeIrf:
          for (int j = 0; j <= h; ++j) v += dr.irf(variable, j);
          break;
        case TargetKind::VarianceShare: {
          const double num = dr.sigma_tr.row(variable) * dr.q;
          const double den = dr.sigma_tr.row(variable).squaredNorm();
          v = num * num / den;
          break;
        }
      }
      values[i] = v;
    }
    std::sort(values.begin(), values.end());
    band[static_cast<std::size_t>(h)] =
        Interval::make(quantile_interpolated(values, tail), quantile_interpolated(values, 1.0 - tail));
  }
  return band;
}

}  // namespace svarsets
