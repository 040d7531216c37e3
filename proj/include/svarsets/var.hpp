#pragma once

// Reduced-form VAR toolkit: OLS estimation, moving-average coefficients,
// structural impulse responses for a given impact direction, and Gaussian
// simulation.  Everything downstream (restriction stacks, bootstrap,
// Monte Carlo designs) builds on these types.

#include <cmath>
#include <string>
#include <vector>

#include "svarsets/common.hpp"
#include "svarsets/rng.hpp"

namespace svarsets {

struct TimeSeriesData {
  Matrix values;                    // T x n, one column per variable
  std::vector<std::string> names;   // optional, size n when present

  int T() const { return static_cast<int>(values.rows()); }
  int n() const { return static_cast<int>(values.cols()); }
};

enum class Deterministics { None, Intercept, InterceptTrend };

struct VarSpec {
  int n = 0;
  int p = 0;
  Deterministics det = Deterministics::Intercept;

  int det_terms() const {
    switch (det) {
      case Deterministics::None: return 0;
      case Deterministics::Intercept: return 1;
      case Deterministics::InterceptTrend: return 2;
    }
    return 0;
  }
  int regressors() const { return n * p + det_terms(); }
};

// A data-generating process: lag matrices, optional intercept, impact matrix.
struct VarProcess {
  std::vector<Matrix> lag_coeffs;   // A_1..A_p, each n x n
  Vector intercept;                 // n, may be zero
  Matrix sigma_tr;                  // n x n lower triangular, positive diagonal

  int n() const { return static_cast<int>(sigma_tr.rows()); }
  int p() const { return static_cast<int>(lag_coeffs.size()); }
};

struct VarEstimate {
  VarSpec spec;
  std::vector<Matrix> lag_coeffs;   // A_1..A_p
  Matrix det_coeffs;                // n x det_terms(), column order: const, trend
  Matrix sigma_u;                   // n x n innovation covariance
  Matrix sigma_tr;                  // lower Cholesky factor of sigma_u
  Matrix residuals;                 // (T - p) x n
  int sample_size = 0;              // raw T of the estimation data

  VarProcess process() const {
    VarProcess proc;
    proc.lag_coeffs = lag_coeffs;
    proc.sigma_tr = sigma_tr;
    proc.intercept = (spec.det == Deterministics::None)
                         ? Vector::Zero(spec.n)
                         : Vector(det_coeffs.col(0));
    return proc;
  }
};

inline Matrix companion_matrix(const std::vector<Matrix>& lag_coeffs) {
  const int p = static_cast<int>(lag_coeffs.size());
  if (p == 0) throw config_error("companion_matrix: need at least one lag");
  const int n = static_cast<int>(lag_coeffs[0].rows());
  Matrix comp = Matrix::Zero(n * p, n * p);
  for (int j = 0; j < p; ++j) comp.block(0, j * n, n, n) = lag_coeffs[j];
  if (p > 1) comp.block(n, 0, n * (p - 1), n * (p - 1)).setIdentity();
  return comp;
}

inline double spectral_radius(const Matrix& m) {
  return m.eigenvalues().cwiseAbs().maxCoeff();
}

inline bool is_stable(const std::vector<Matrix>& lag_coeffs, double threshold = 1.0 - 1e-8) {
  if (lag_coeffs.empty()) return true;
  return spectral_radius(companion_matrix(lag_coeffs)) < threshold;
}

// Moving-average matrices C_0..C_H of the pure-lag recursion
// C_h = sum_{j=1..min(h,p)} A_j C_{h-j}, C_0 = I.
inline std::vector<Matrix> vma_coefficients(const std::vector<Matrix>& lag_coeffs,
                                            int n, int horizon) {
  if (horizon < 0) throw config_error("vma_coefficients: horizon must be >= 0");
  const int p = static_cast<int>(lag_coeffs.size());
  std::vector<Matrix> c;
  c.reserve(horizon + 1);
  c.push_back(Matrix::Identity(n, n));
  for (int h = 1; h <= horizon; ++h) {
    Matrix acc = Matrix::Zero(n, n);
    for (int j = 1; j <= std::min(h, p); ++j) acc += lag_coeffs[j - 1] * c[h - j];
    c.push_back(std::move(acc));
  }
  return c;
}

inline std::vector<Matrix> vma_coefficients(const VarEstimate& est, int horizon) {
  return vma_coefficients(est.lag_coeffs, est.spec.n, horizon);
}

// Responses of all variables to the unit structural shock with impact
// direction q: column h holds C_h * sigma_tr * q.
inline Matrix structural_irf(const VarEstimate& est, const Vector& q, int horizon) {
  if (q.size() != est.spec.n) throw config_error("structural_irf: q has wrong dimension");
  const auto c = vma_coefficients(est, horizon);
  Matrix out(est.spec.n, horizon + 1);
  const Vector impact = est.sigma_tr * q;
  for (int h = 0; h <= horizon; ++h) out.col(h) = c[h] * impact;
  return out;
}

namespace detail {

// Trimmed left-hand side and regressor matrix of the lag regression:
// Y = X B + E with X = [deterministics, lag 1 block, ..., lag p block].
struct RegressionDesign {
  Matrix y;  // (T - p) x n
  Matrix x;  // (T - p) x regressors
};

inline RegressionDesign regression_design(const TimeSeriesData& data, const VarSpec& spec) {
  const int T = data.T(), n = data.n(), p = spec.p;
  if (n != spec.n) throw config_error("estimate_ols: data has " + std::to_string(n) +
                                      " variables, spec expects " + std::to_string(spec.n));
  if (n < 1 || p < 0) throw config_error("estimate_ols: invalid dimensions");
  const int k = spec.regressors();
  const int rows = T - p;
  if (rows <= k) throw config_error("estimate_ols: sample too short for " +
                                    std::to_string(k) + " regressors");
  if (k == 0) throw config_error("estimate_ols: nothing to estimate (p=0, no deterministics)");

  RegressionDesign d;
  d.y = data.values.bottomRows(rows);
  d.x.resize(rows, k);
  int col = 0;
  if (spec.det != Deterministics::None) d.x.col(col++).setOnes();
  if (spec.det == Deterministics::InterceptTrend)
    d.x.col(col++) = Vector::LinSpaced(rows, 1.0, static_cast<double>(rows));
  for (int lag = 1; lag <= p; ++lag)
    for (int j = 0; j < n; ++j)
      d.x.col(col++) = data.values.col(j).segment(p - lag, rows);
  return d;
}

}  // namespace detail

inline VarEstimate estimate_ols(const TimeSeriesData& data, const VarSpec& spec) {
  const int T = data.T(), n = data.n(), p = spec.p;
  const int k = spec.regressors();
  const int rows = T - p;
  const auto design = detail::regression_design(data, spec);
  const Matrix& Y = design.y;
  const Matrix& X = design.x;

  Eigen::ColPivHouseholderQR<Matrix> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < k)
    throw numeric_error("estimate_ols: regressor matrix is rank deficient (rank " +
                        std::to_string(qr.rank()) + " of " + std::to_string(k) + ")");
  Matrix B = qr.solve(Y);  // k x n
  Matrix E = Y - X * B;

  VarEstimate est;
  est.spec = spec;
  est.sample_size = T;
  est.residuals = E;
  const int dof = rows - k;
  est.sigma_u = (E.transpose() * E) / static_cast<double>(dof);

  const int d = spec.det_terms();
  est.det_coeffs = B.topRows(d).transpose();  // n x d
  est.lag_coeffs.reserve(p);
  for (int lag = 0; lag < p; ++lag)
    est.lag_coeffs.push_back(B.middleRows(d + lag * n, n).transpose());

  if (!(est.sigma_u.diagonal().maxCoeff() > 0.0))
    throw numeric_error("estimate_ols: residual covariance is zero (degenerate sample)");
  Eigen::LLT<Matrix> llt(est.sigma_u);
  if (llt.info() != Eigen::Success)
    throw numeric_error("estimate_ols: residual covariance is not positive definite");
  est.sigma_tr = llt.matrixL();
  return est;
}

struct BicEntry {
  int lags = 0;
  double bic = 0.0;
};

// Schwarz criterion per candidate lag order, all fit on the common sample
// that remains after conditioning on max_lags initial observations, so the
// values are comparable across orders.  Smaller is better.
inline std::vector<BicEntry> lag_order_bic(const TimeSeriesData& data, int max_lags,
                                           Deterministics det = Deterministics::Intercept) {
  if (max_lags < 0) throw config_error("lag_order_bic: max_lags must be >= 0");
  const int n = data.n();
  std::vector<BicEntry> table;
  table.reserve(static_cast<std::size_t>(max_lags) + 1);
  for (int p = 0; p <= max_lags; ++p) {
    // Trim leading rows so every order conditions on the same sample.
    TimeSeriesData trimmed;
    trimmed.names = data.names;
    trimmed.values = data.values.bottomRows(data.T() - (max_lags - p));
    VarSpec spec;
    spec.n = n;
    spec.p = p;
    spec.det = det;
    const auto design = detail::regression_design(trimmed, spec);
    const Eigen::Index rows = design.y.rows(), k = design.x.cols();
    if (rows <= k)
      throw config_error("lag_order_bic: sample too short for max_lags = " +
                         std::to_string(max_lags));
    const Matrix beta = design.x.colPivHouseholderQr().solve(design.y);
    const Matrix resid = design.y - design.x * beta;
    const Matrix sigma_ml = resid.transpose() * resid / static_cast<double>(rows);
    Eigen::LLT<Matrix> llt(sigma_ml);
    if (llt.info() != Eigen::Success)
      throw numeric_error("lag_order_bic: singular residual covariance at p = " +
                          std::to_string(p));
    double log_det = 0.0;
    for (int i = 0; i < n; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
    const double t_eff = static_cast<double>(rows);
    const double penalty = std::log(t_eff) / t_eff * static_cast<double>(k * n);
    table.push_back({p, log_det + penalty});
  }
  return table;
}

struct SimulateOptions {
  int burn_in = 100;
  bool allow_unstable = false;  // start at zero instead of the unconditional mean
  double stability_threshold = 1.0 - 1e-8;
};

// Draw T observations of y_t = c + sum_j A_j y_{t-j} + sigma_tr eps_t with
// Gaussian innovations.  Stable processes start at the unconditional mean
// and discard a burn-in span.
inline Matrix simulate_var(const VarProcess& proc, int T, Rng& rng,
                           const SimulateOptions& opts = {}) {
  const int n = proc.n(), p = proc.p();
  if (T < 1) throw config_error("simulate_var: T must be positive");
  const bool stable = proc.lag_coeffs.empty() ||
                      spectral_radius(companion_matrix(proc.lag_coeffs)) < opts.stability_threshold;
  if (!stable && !opts.allow_unstable)
    throw config_error("simulate_var: process is not stable; pass allow_unstable to force");

  const Vector c = proc.intercept.size() == n ? proc.intercept : Vector::Zero(n);
  Vector mean = Vector::Zero(n);
  if (stable && p > 0) {
    Matrix lhs = Matrix::Identity(n, n);
    for (const auto& a : proc.lag_coeffs) lhs -= a;
    mean = lhs.partialPivLu().solve(c);
  } else if (p == 0) {
    mean = c;
  }

  std::vector<Vector> state(p, mean);
  Matrix out(T, n);
  std::normal_distribution<double> normal;
  const int total = T + opts.burn_in;
  for (int t = 0; t < total; ++t) {
    Vector eps(n);
    for (int i = 0; i < n; ++i) eps(i) = normal(rng);
    Vector y = c + proc.sigma_tr * eps;
    for (int j = 0; j < p; ++j) y += proc.lag_coeffs[j] * state[j];
    if (p > 0) {
      for (int j = p - 1; j > 0; --j) state[j] = state[j - 1];
      state[0] = y;
    }
    if (t >= opts.burn_in) out.row(t - opts.burn_in) = y.transpose();
  }
  return out;
}

}  // namespace svarsets
