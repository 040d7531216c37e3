#pragma once

// Moment-inequality test statistic and simulated critical values.
//
// For a candidate impact direction q the restricted responses satisfy
// S(q) phi >= 0 at the true reduced form.  The sample statistic studentizes
// each kept row,
//   xi_j = sqrt(T) * [S(q) phi_hat]_j / sqrt(D_jj),  D = diag(S Lambda S'),
// and measures violation by
//   G(q) = min_{nu >= 0} (xi - nu)' B (xi - nu)
// with B = I (closed form: sum of squared negative parts) or the inverse of
// the estimated moment correlation matrix (a small nonnegative QP).
//
// Critical values follow the generalized moment-selection recipe of
// Andrews and Soares: rows with xi_j >= kappa_T = mult * ln(ln T) are
// treated as slack and dropped; the remaining rows' null distribution is
// simulated by Gaussian draws Z through A_hat' = D^{-1/2} S L (L the
// Cholesky factor of Lambda), and the critical value is the 1 - alpha
// empirical quantile (higher interpolation) of the simulated statistics.
// With no binding rows the statistic degenerates at zero and the critical
// value is zero.

#include <algorithm>
#include <cmath>
#include <vector>

#include "svarsets/common.hpp"
#include "svarsets/nnls.hpp"
#include "svarsets/restrictions.hpp"
#include "svarsets/rng.hpp"
#include "svarsets/stats.hpp"

namespace svarsets {

enum class WeightScheme { Identity, InverseCorrelation };

struct MomentOptions {
  WeightScheme scheme = WeightScheme::Identity;
  double kappa_mult = 1.96;   // kappa_T = kappa_mult * ln(ln T)
  double d_floor_rel = 1e-14; // drop rows whose variance is this far below the max
  double row_tol = 1e-10;     // numeric-zero threshold for rows of Stilde(q)
};

inline double kappa_value(int sample_size, double mult = 1.96) {
  if (sample_size < 4) throw config_error("kappa_value: sample too small for ln(ln T)");
  return mult * std::log(std::log(static_cast<double>(sample_size)));
}

// Everything the critical-value simulation needs about one direction q.
struct MomentDiagnostics {
  std::vector<int> kept;        // indices into the stack's sign rows (plus
                                // equality rows in the augmented variant)
  std::vector<char> is_equality;
  Vector xi;                    // studentized moments, aligned with kept
  Vector d_diag;                // moment variances, aligned with kept
  Matrix a_hat_t;               // D^{-1/2} S L, rows aligned with kept
  Matrix omega_inv;             // inverse moment correlation (InverseCorrelation only)
  std::vector<char> binding;    // xi_j < kappa (equality rows always bind)
  int r1 = 0;                   // number of binding rows
  int r2 = 0;                   // kept - r1
  double kappa = 0.0;
  double g = 0.0;
};

namespace detail {

// Shared core: rows = coefficient rows of the moments (inequality rows
// first), eq_count of the trailing rows are equalities.
inline double moment_objective(const ReducedFormStack& stack, const Matrix& rows_in,
                               const std::vector<int>& kept_in, int eq_count,
                               const MomentOptions& opts, MomentDiagnostics* diag) {
  if (!stack.has_lambda())
    throw config_error("moment objective: stack carries no bootstrap covariance");
  const double kappa = kappa_value(stack.sample_size, opts.kappa_mult);
  const double sqrt_t = std::sqrt(static_cast<double>(stack.sample_size));

  Matrix rows = rows_in;
  std::vector<int> kept = kept_in;
  std::vector<char> is_eq(kept.size(), 0);
  for (std::size_t i = kept.size() - static_cast<std::size_t>(eq_count); i < kept.size(); ++i)
    is_eq[i] = 1;

  // variance floor: a moment whose bootstrap variance collapses relative to
  // the rest cannot be studentized stably
  if (rows.rows() > 0) {
    Vector d_all = (rows * stack.lambda_qq * rows.transpose()).diagonal();
    const double floor = opts.d_floor_rel * d_all.maxCoeff();
    std::vector<int> keep_idx;
    for (Eigen::Index j = 0; j < d_all.size(); ++j)
      if (d_all(j) >= floor && d_all(j) > 0.0) keep_idx.push_back(static_cast<int>(j));
    if (static_cast<Eigen::Index>(keep_idx.size()) != rows.rows()) {
      Matrix pruned(static_cast<Eigen::Index>(keep_idx.size()), rows.cols());
      std::vector<int> kept2;
      std::vector<char> eq2;
      for (std::size_t i = 0; i < keep_idx.size(); ++i) {
        pruned.row(static_cast<Eigen::Index>(i)) = rows.row(keep_idx[i]);
        kept2.push_back(kept[static_cast<std::size_t>(keep_idx[i])]);
        eq2.push_back(is_eq[static_cast<std::size_t>(keep_idx[i])]);
      }
      rows = std::move(pruned);
      kept = std::move(kept2);
      is_eq = std::move(eq2);
    }
  }

  const Eigen::Index r = rows.rows();
  if (diag) {
    *diag = MomentDiagnostics{};
    diag->kappa = kappa;
  }
  if (r == 0) {
    return 0.0;
  }

  const Matrix sigma = rows * stack.lambda_qq * rows.transpose();
  const Vector d = sigma.diagonal();
  const Vector inv_sd = d.array().sqrt().inverse();
  const Vector xi = sqrt_t * inv_sd.asDiagonal() * (rows * stack.phi_q);

  double g = 0.0;
  Matrix omega_inv;
  if (opts.scheme == WeightScheme::Identity) {
    for (Eigen::Index j = 0; j < r; ++j) {
      if (is_eq[static_cast<std::size_t>(j)]) {
        g += xi(j) * xi(j);
      } else if (xi(j) < 0.0) {
        g += xi(j) * xi(j);
      }
    }
  } else {
    const Matrix omega = inv_sd.asDiagonal() * sigma * inv_sd.asDiagonal();
    Eigen::LLT<Matrix> llt(omega);
    if (llt.info() != Eigen::Success)
      throw numeric_error("moment objective: moment correlation matrix is not positive definite");
    omega_inv = llt.solve(Matrix::Identity(r, r));
    if (eq_count == 0) {
      g = nnls_project(xi, omega_inv).objective;
    } else {
      // minimize (xi - nu)' B (xi - nu) with nu >= 0 on inequality rows and
      // nu = 0 on equality rows: a nonnegative QP over the inequality block
      std::vector<int> iidx;
      for (Eigen::Index j = 0; j < r; ++j)
        if (!is_eq[static_cast<std::size_t>(j)]) iidx.push_back(static_cast<int>(j));
      const Eigen::Index ni = static_cast<Eigen::Index>(iidx.size());
      Matrix bii(ni, ni);
      Vector rhs(ni);
      const Vector bxi = omega_inv * xi;
      for (Eigen::Index a = 0; a < ni; ++a) {
        rhs(a) = bxi(iidx[static_cast<std::size_t>(a)]);
        for (Eigen::Index c = 0; c < ni; ++c)
          bii(a, c) = omega_inv(iidx[static_cast<std::size_t>(a)], iidx[static_cast<std::size_t>(c)]);
      }
      const QpResult qp = qp_nonneg(bii, rhs);
      Vector nu = Vector::Zero(r);
      for (Eigen::Index a = 0; a < ni; ++a) nu(iidx[static_cast<std::size_t>(a)]) = qp.x(a);
      const Vector diff = xi - nu;
      g = diff.dot(omega_inv * diff);
    }
  }

  if (diag) {
    diag->kept = kept;
    diag->is_equality = is_eq;
    diag->xi = xi;
    diag->d_diag = d;
    diag->a_hat_t = inv_sd.asDiagonal() * rows * stack.lambda_qq_chol;
    diag->omega_inv = omega_inv;
    diag->binding.assign(static_cast<std::size_t>(r), 0);
    for (Eigen::Index j = 0; j < r; ++j) {
      const bool bind = is_eq[static_cast<std::size_t>(j)] || xi(j) < kappa;
      diag->binding[static_cast<std::size_t>(j)] = bind ? 1 : 0;
      diag->r1 += bind ? 1 : 0;
    }
    diag->r2 = static_cast<int>(r) - diag->r1;
    diag->g = g;
  }
  return g;
}

}  // namespace detail

// Test statistic for the sign restrictions at direction q.
inline double objective_g(const ReducedFormStack& stack, const Vector& q,
                          const MomentOptions& opts = {}, MomentDiagnostics* diag = nullptr) {
  const SelectedRows sel = s_and_v(stack, q, opts.row_tol);
  return detail::moment_objective(stack, sel.s, sel.kept, 0, opts, diag);
}

// Equality-augmented statistic: sign rows as above plus equality rows whose
// deviations are penalized in both directions.
inline double objective_g_eq(const ReducedFormStack& stack, const Vector& q,
                             const MomentOptions& opts = {}, MomentDiagnostics* diag = nullptr) {
  const SelectedRows sel = s_and_v(stack, q, opts.row_tol);
  const Matrix eq = stilde_equality(stack, q);
  const double tol = opts.row_tol * (1.0 + stack.phi_q.norm());
  std::vector<int> eq_kept;
  for (Eigen::Index r = 0; r < eq.rows(); ++r)
    if (eq.row(r).norm() >= tol) eq_kept.push_back(static_cast<int>(r));

  Matrix rows(sel.s.rows() + static_cast<Eigen::Index>(eq_kept.size()), stack.m());
  rows.topRows(sel.s.rows()) = sel.s;
  std::vector<int> kept = sel.kept;
  const int sign_rows = stack.sign_row_count();
  for (std::size_t i = 0; i < eq_kept.size(); ++i) {
    rows.row(sel.s.rows() + static_cast<Eigen::Index>(i)) = eq.row(eq_kept[i]);
    kept.push_back(sign_rows + eq_kept[i]);
  }
  return detail::moment_objective(stack, rows, kept, static_cast<int>(eq_kept.size()), opts, diag);
}

// Standard-normal innovation panel shared by every direction on a grid, so
// critical values across q differ only through the moment geometry.
inline Matrix draw_panel(int n_z, int dim, Rng& rng) {
  if (n_z < 1) throw config_error("draw_panel: need at least one draw");
  return gaussian_matrix(n_z, dim, rng);
}

inline Matrix draw_panel(int n_z, int dim, std::uint64_t seed) {
  Rng rng = derive_rng(seed, {0xc217u});
  return draw_panel(n_z, dim, rng);
}

namespace detail {

// Simulated statistics for the binding rows, sorted ascending.
inline std::vector<double> simulated_statistics(const MomentDiagnostics& diag,
                                                const Matrix& panel,
                                                const MomentOptions& opts) {
  const int r1 = diag.r1;
  std::vector<int> bind;
  for (std::size_t j = 0; j < diag.binding.size(); ++j)
    if (diag.binding[j]) bind.push_back(static_cast<int>(j));
  Matrix ab(r1, diag.a_hat_t.cols());
  std::vector<char> eq(static_cast<std::size_t>(r1), 0);
  bool any_eq = false;
  for (int i = 0; i < r1; ++i) {
    ab.row(i) = diag.a_hat_t.row(bind[static_cast<std::size_t>(i)]);
    eq[static_cast<std::size_t>(i)] = diag.is_equality[static_cast<std::size_t>(bind[static_cast<std::size_t>(i)])];
    any_eq = any_eq || eq[static_cast<std::size_t>(i)];
  }
  if (panel.cols() != ab.cols())
    throw config_error("critical_value: panel dimension does not match the moment stack");

  Matrix w;            // metric on the binding block (InverseCorrelation)
  Matrix wii;          // inequality sub-block for the pinned QP
  std::vector<int> iidx;
  if (opts.scheme == WeightScheme::InverseCorrelation) {
    w.resize(r1, r1);
    for (int a = 0; a < r1; ++a)
      for (int c = 0; c < r1; ++c)
        w(a, c) = diag.omega_inv(bind[static_cast<std::size_t>(a)], bind[static_cast<std::size_t>(c)]);
    if (any_eq) {
      for (int a = 0; a < r1; ++a)
        if (!eq[static_cast<std::size_t>(a)]) iidx.push_back(a);
      wii.resize(static_cast<Eigen::Index>(iidx.size()), static_cast<Eigen::Index>(iidx.size()));
      for (std::size_t a = 0; a < iidx.size(); ++a)
        for (std::size_t c = 0; c < iidx.size(); ++c)
          wii(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) = w(iidx[a], iidx[c]);
    }
  }

  const Matrix draws = panel * ab.transpose();  // n_z x r1
  std::vector<double> stats(static_cast<std::size_t>(panel.rows()));
  for (Eigen::Index z = 0; z < panel.rows(); ++z) {
    const Vector v = draws.row(z).transpose();
    double gbar = 0.0;
    if (opts.scheme == WeightScheme::Identity) {
      for (int j = 0; j < r1; ++j) {
        if (eq[static_cast<std::size_t>(j)]) gbar += v(j) * v(j);
        else if (v(j) < 0.0) gbar += v(j) * v(j);
      }
    } else if (!any_eq) {
      gbar = nnls_project(v, w).objective;
    } else {
      const Vector wv = w * v;
      Vector rhs(static_cast<Eigen::Index>(iidx.size()));
      for (std::size_t a = 0; a < iidx.size(); ++a) rhs(static_cast<Eigen::Index>(a)) = wv(iidx[a]);
      const QpResult qp = qp_nonneg(wii, rhs);
      Vector nu = Vector::Zero(r1);
      for (std::size_t a = 0; a < iidx.size(); ++a) nu(iidx[a]) = qp.x(static_cast<Eigen::Index>(a));
      const Vector diff = v - nu;
      gbar = diff.dot(w * diff);
    }
    stats[static_cast<std::size_t>(z)] = gbar;
  }
  std::sort(stats.begin(), stats.end());
  return stats;
}

}  // namespace detail

// 1 - alpha1 critical value for the statistic at one direction.  The panel
// must have one column per entry of phi_q.
inline double critical_value(const MomentDiagnostics& diag, const Matrix& panel,
                             double alpha1, const MomentOptions& opts = {}) {
  if (alpha1 <= 0.0 || alpha1 >= 1.0) throw config_error("critical_value: alpha1 must lie in (0, 1)");
  if (diag.r1 == 0) return 0.0;
  const std::vector<double> stats = detail::simulated_statistics(diag, panel, opts);
  return quantile_higher(stats, 1.0 - alpha1);
}

// Critical values for several levels from one shared set of draws.
inline std::vector<double> critical_values(const MomentDiagnostics& diag, const Matrix& panel,
                                           const std::vector<double>& alpha1s,
                                           const MomentOptions& opts = {}) {
  for (double a : alpha1s)
    if (a <= 0.0 || a >= 1.0) throw config_error("critical_values: alpha1 must lie in (0, 1)");
  std::vector<double> out(alpha1s.size(), 0.0);
  if (diag.r1 == 0) return out;
  const std::vector<double> stats = detail::simulated_statistics(diag, panel, opts);
  for (std::size_t i = 0; i < alpha1s.size(); ++i)
    out[i] = quantile_higher(stats, 1.0 - alpha1s[i]);
  return out;
}

}  // namespace svarsets
