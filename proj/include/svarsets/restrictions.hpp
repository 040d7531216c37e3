#pragma once

// Sign-restriction bookkeeping.
//
// A restriction set pins the signs of selected impulse responses.  For the
// impact direction q on the unit sphere, the restricted responses are
// bilinear: response(variable i, horizon h) = row_i(C_h * sigma_tr) * q.
// Stacking the distinct reduced-form coefficients of all restricted rows
// into one vector phi_q lets the whole system be written as
// Stilde(q) * phi_q >= 0, where Stilde(q) is linear in q with a known
// sparsity pattern.  Inference needs exactly three ingredients from here:
// phi_q, the map q -> Stilde(q), and the response rows of any target
// quantities (phi_theta).  Structural zeros of the coefficient matrices
// (upper triangle of sigma_tr at impact, everything past impact in a pure
// innovation model) are excluded from phi_q so its sampling covariance can
// be full rank.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "svarsets/common.hpp"
#include "svarsets/var.hpp"

namespace svarsets {

enum class SignDirection { NonNegative, NonPositive };

struct SignRestriction {
  int variable = 0;  // 0-based
  int horizon = 0;
  SignDirection direction = SignDirection::NonNegative;
  bool cumulative = false;
};

// A response row forced to zero; only used through the equality-augmented
// objective, never as part of a plain sign-restriction set.
struct EqualityRestriction {
  int variable = 0;
  int horizon = 0;
  bool cumulative = false;
};

enum class TargetKind { Irf, CumulativeIrf, VarianceShare };

struct ThetaTarget {
  TargetKind kind = TargetKind::Irf;
  int variable = 0;
  int horizon = 0;
  // optional parameter-space bounds intersected with Wald intervals
  std::optional<double> lower_bound;
  std::optional<double> upper_bound;
};

struct RestrictionSet {
  std::vector<SignRestriction> signs;
  int zero_count = 0;  // first zero_count variables have identically zero impact

  void validate(int n) const {
    if (n < 2) throw config_error("restrictions: need at least two variables");
    if (signs.empty()) throw config_error("restrictions: at least one sign restriction required");
    if (zero_count < 0 || zero_count >= n)
      throw config_error("restrictions: zero_count must lie in [0, n)");
    std::map<std::tuple<int, int, bool>, SignDirection> seen;
    for (const auto& s : signs) {
      if (s.variable < 0 || s.variable >= n)
        throw config_error("restrictions: variable index out of range");
      if (s.horizon < 0) throw config_error("restrictions: negative horizon");
      const auto key = std::make_tuple(s.variable, s.horizon, s.cumulative);
      const auto it = seen.find(key);
      if (it != seen.end()) {
        if (it->second != s.direction)
          throw config_error("restrictions: opposing sign restrictions on variable " +
                             std::to_string(s.variable + 1) + ", horizon " +
                             std::to_string(s.horizon));
        throw config_error("restrictions: duplicate sign restriction on variable " +
                           std::to_string(s.variable + 1) + ", horizon " +
                           std::to_string(s.horizon));
      }
      seen.emplace(key, s.direction);
    }
  }

  int max_horizon() const {
    int h = 0;
    for (const auto& s : signs) h = std::max(h, s.horizon);
    return h;
  }
};

inline int restricted_domain_dim(int n, int zero_count) {
  if (zero_count < 0 || zero_count >= n)
    throw config_error("restricted_domain_dim: zero_count must lie in [0, n)");
  return n - zero_count;
}

// One restricted (or equality) response row.  phi_index maps each of the n
// coefficient slots to a position in phi_q, with -1 marking structural
// zeros.  The direction sign multiplies the whole row of Stilde.
struct StackRow {
  std::vector<int> phi_index;  // size n
  double sign = 1.0;
  int variable = 0;
  int horizon = 0;
  bool cumulative = false;
  bool equality = false;
};

struct ReducedFormStack {
  int n = 0;
  int sample_size = 0;
  int zero_count = 0;
  int max_horizon = 0;          // largest horizon entering phi_q or phi_theta

  Vector phi_q;                 // m distinct reduced-form coefficients
  std::vector<StackRow> rows;   // sign rows first, then any equality rows
  Matrix sigma_tr;              // kept for variance-share targets

  std::vector<ThetaTarget> targets;
  Matrix phi_theta;             // targets x n response rows (raw, zeros kept)

  // filled by the bootstrap
  Matrix lambda_qq;             // m x m
  Matrix lambda_qq_chol;        // lower factor of lambda_qq
  std::vector<Matrix> lambda_theta;  // per target, n x n

  int m() const { return static_cast<int>(phi_q.size()); }
  int sign_row_count() const {
    int r = 0;
    for (const auto& row : rows) r += row.equality ? 0 : 1;
    return r;
  }
  bool has_lambda() const { return lambda_qq.size() > 0; }
};

namespace detail {

// Boolean reachability masks: entry (i,j) of C_h * sigma_tr can be nonzero
// for generic parameter values iff mask_h(i,j).  At impact this is the
// lower triangle; with at least one lag every later horizon is dense, and
// in a pure innovation model (p = 0) later horizons vanish entirely.
inline std::vector<Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>>
response_masks(int n, int p, int horizon) {
  using BoolMat = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
  std::vector<BoolMat> masks;
  masks.reserve(horizon + 1);
  BoolMat impact(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) impact(i, j) = j <= i;
  masks.push_back(impact);
  for (int h = 1; h <= horizon; ++h) {
    BoolMat m = BoolMat::Constant(n, n, false);
    if (p > 0) {
      // dense lag matrices times any reachable pattern fill the row span
      for (int j = 1; j <= std::min(h, p); ++j)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) m(a, b) = m(a, b) || masks[h - j](c, b);
    }
    masks.push_back(m);
  }
  return masks;
}

struct ResponseRows {
  std::vector<Matrix> plain;  // C_h * sigma_tr per horizon
  std::vector<Matrix> cumul;  // partial sums of the above

  const Matrix& get(int h, bool cumulative) const {
    return cumulative ? cumul[h] : plain[h];
  }
};

inline ResponseRows response_rows(const VarEstimate& est, int horizon) {
  ResponseRows out;
  const auto c = vma_coefficients(est, horizon);
  out.plain.reserve(horizon + 1);
  for (int h = 0; h <= horizon; ++h) out.plain.push_back(c[h] * est.sigma_tr);
  out.cumul.reserve(horizon + 1);
  Matrix acc = Matrix::Zero(est.spec.n, est.spec.n);
  for (int h = 0; h <= horizon; ++h) {
    acc += out.plain[h];
    out.cumul.push_back(acc);
  }
  return out;
}

}  // namespace detail

// Assemble the stack layout and fill it with the point estimate's values.
inline ReducedFormStack build_phi(const VarEstimate& est, const RestrictionSet& restr,
                                  const std::vector<ThetaTarget>& targets = {},
                                  const std::vector<EqualityRestriction>& equalities = {}) {
  const int n = est.spec.n;
  restr.validate(n);
  for (const auto& t : targets) {
    if (t.variable < 0 || t.variable >= n)
      throw config_error("targets: variable index out of range");
    if (t.horizon < 0) throw config_error("targets: negative horizon");
    if (t.kind == TargetKind::VarianceShare && t.horizon != 0)
      throw config_error("targets: variance shares are defined at horizon 0 here");
  }

  ReducedFormStack stack;
  stack.n = n;
  stack.sample_size = est.sample_size;
  stack.zero_count = restr.zero_count;
  stack.sigma_tr = est.sigma_tr;
  stack.targets = targets;

  int max_h = restr.max_horizon();
  for (const auto& e : equalities) {
    if (e.variable < 0 || e.variable >= n)
      throw config_error("equalities: variable index out of range");
    if (e.horizon < 0) throw config_error("equalities: negative horizon");
    max_h = std::max(max_h, e.horizon);
  }
  for (const auto& t : targets) max_h = std::max(max_h, t.horizon);
  stack.max_horizon = max_h;

  const auto masks = detail::response_masks(n, est.spec.p, max_h);
  const auto rows = detail::response_rows(est, max_h);

  // Deduplicated coefficient registry: (variable, horizon, cumulative, col)
  std::map<std::tuple<int, int, bool, int>, int> registry;
  std::vector<double> phi_values;
  auto coeff_index = [&](int variable, int horizon, bool cumulative, int col) -> int {
    // the cumulative response at horizon 0 is the impact response itself;
    // canonicalize so the two spellings share one stacked coefficient
    if (horizon == 0) cumulative = false;
    // cumulative rows can be nonzero wherever any summed horizon is
    bool can_be_nonzero = false;
    if (cumulative) {
      for (int h = 0; h <= horizon; ++h) can_be_nonzero = can_be_nonzero || masks[h](variable, col);
    } else {
      can_be_nonzero = masks[horizon](variable, col);
    }
    if (!can_be_nonzero) return -1;
    const auto key = std::make_tuple(variable, horizon, cumulative, col);
    auto it = registry.find(key);
    if (it != registry.end()) return it->second;
    const int idx = static_cast<int>(phi_values.size());
    registry.emplace(key, idx);
    phi_values.push_back(rows.get(horizon, cumulative)(variable, col));
    return idx;
  };

  auto push_row = [&](int variable, int horizon, bool cumulative, double sign, bool equality) {
    StackRow row;
    row.variable = variable;
    row.horizon = horizon;
    row.cumulative = cumulative;
    row.sign = sign;
    row.equality = equality;
    row.phi_index.resize(n);
    for (int col = 0; col < n; ++col)
      row.phi_index[col] = coeff_index(variable, horizon, cumulative, col);
    stack.rows.push_back(std::move(row));
  };

  for (const auto& s : restr.signs)
    push_row(s.variable, s.horizon, s.cumulative,
             s.direction == SignDirection::NonNegative ? 1.0 : -1.0, false);
  for (const auto& e : equalities) push_row(e.variable, e.horizon, e.cumulative, 1.0, true);

  if (phi_values.empty())
    throw config_error("restrictions: every restricted response is structurally zero");
  stack.phi_q = Eigen::Map<const Vector>(phi_values.data(), static_cast<Eigen::Index>(phi_values.size()));

  stack.phi_theta = Matrix::Zero(static_cast<Eigen::Index>(targets.size()), n);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (targets[t].kind == TargetKind::VarianceShare) continue;  // uses sigma_tr directly
    const bool cum = targets[t].kind == TargetKind::CumulativeIrf;
    stack.phi_theta.row(static_cast<Eigen::Index>(t)) =
        rows.get(targets[t].horizon, cum).row(targets[t].variable);
  }
  return stack;
}

// Refill phi_q / phi_theta from another estimate with the same layout;
// used by the bootstrap so replications stay perfectly aligned.
inline void fill_stack_values(const VarEstimate& est, const ReducedFormStack& stack,
                              Vector& phi_q, Matrix& phi_theta) {
  const auto rows = detail::response_rows(est, stack.max_horizon);
  phi_q.resize(stack.m());
  for (const auto& row : stack.rows) {
    const Matrix& src = rows.get(row.horizon, row.cumulative);
    for (int col = 0; col < stack.n; ++col)
      if (row.phi_index[col] >= 0) phi_q(row.phi_index[col]) = src(row.variable, col);
  }
  phi_theta = Matrix::Zero(static_cast<Eigen::Index>(stack.targets.size()), stack.n);
  for (std::size_t t = 0; t < stack.targets.size(); ++t) {
    if (stack.targets[t].kind == TargetKind::VarianceShare) continue;
    const bool cum = stack.targets[t].kind == TargetKind::CumulativeIrf;
    phi_theta.row(static_cast<Eigen::Index>(t)) =
        rows.get(stack.targets[t].horizon, cum).row(stack.targets[t].variable);
  }
}

// Stilde(q): sign-restriction rows only, evaluated at impact direction q.
inline Matrix stilde(const ReducedFormStack& stack, const Vector& q) {
  if (q.size() != stack.n) throw config_error("stilde: q has wrong dimension");
  Matrix s = Matrix::Zero(stack.sign_row_count(), stack.m());
  int r = 0;
  for (const auto& row : stack.rows) {
    if (row.equality) continue;
    for (int col = 0; col < stack.n; ++col)
      if (row.phi_index[col] >= 0) s(r, row.phi_index[col]) = row.sign * q(col);
    ++r;
  }
  return s;
}

// Same layout for the equality rows, when the stack carries any.
inline Matrix stilde_equality(const ReducedFormStack& stack, const Vector& q) {
  if (q.size() != stack.n) throw config_error("stilde_equality: q has wrong dimension");
  int count = 0;
  for (const auto& row : stack.rows) count += row.equality ? 1 : 0;
  Matrix s = Matrix::Zero(count, stack.m());
  int r = 0;
  for (const auto& row : stack.rows) {
    if (!row.equality) continue;
    for (int col = 0; col < stack.n; ++col)
      if (row.phi_index[col] >= 0) s(r, row.phi_index[col]) = row.sign * q(col);
    ++r;
  }
  return s;
}

// Rows of Stilde(q) with numerically nonzero coefficients, plus the kept
// row indices (the selection the V(q) matrix encodes).
struct SelectedRows {
  Matrix s;                    // r(q) x m
  std::vector<int> kept;       // indices into stack.rows restricted to sign rows
};

inline SelectedRows s_and_v(const ReducedFormStack& stack, const Vector& q,
                            double tol_scale = 1e-10) {
  const Matrix full = stilde(stack, q);
  const double tol = tol_scale * (1.0 + stack.phi_q.norm());
  std::vector<int> kept;
  for (int r = 0; r < full.rows(); ++r)
    if (full.row(r).norm() >= tol) kept.push_back(r);
  SelectedRows out;
  out.s.resize(static_cast<Eigen::Index>(kept.size()), full.cols());
  for (std::size_t i = 0; i < kept.size(); ++i) out.s.row(static_cast<Eigen::Index>(i)) = full.row(kept[i]);
  out.kept = std::move(kept);
  return out;
}

// Value of a target functional at impact direction q.
inline double theta_value(const ReducedFormStack& stack, int target, const Vector& q) {
  if (target < 0 || target >= static_cast<int>(stack.targets.size()))
    throw config_error("theta_value: target index out of range");
  if (q.size() != stack.n) throw config_error("theta_value: q has wrong dimension");
  const ThetaTarget& t = stack.targets[static_cast<std::size_t>(target)];
  if (t.kind == TargetKind::VarianceShare) {
    const double num = stack.sigma_tr.row(t.variable) * q;
    const double den = stack.sigma_tr.row(t.variable).squaredNorm();
    if (den <= 0.0) throw numeric_error("theta_value: zero innovation variance");
    return num * num / den;
  }
  return stack.phi_theta.row(target) * q;
}

}  // namespace svarsets
