#pragma once

// Parametric bootstrap for the sampling covariance of the stacked
// reduced-form coefficients.
//
// The estimated VAR is treated as the data-generating process: each
// replication simulates a fresh Gaussian sample of the original length,
// re-estimates, and rebuilds the stacked coefficient vector.  The
// covariance is accumulated around the point estimate (not the bootstrap
// mean), scaled by the sample size, jointly for phi_q and every target
// row so Wald intervals and the q-set tests share one consistent estimate.

#include <string>
#include <vector>

#include "svarsets/common.hpp"
#include "svarsets/parallel.hpp"
#include "svarsets/restrictions.hpp"
#include "svarsets/rng.hpp"
#include "svarsets/var.hpp"

namespace svarsets {

struct BootstrapConfig {
  int n_lambda = 1000;
  std::uint64_t seed = 0;
  int max_attempts_per_rep = 10;  // redraw budget for degenerate replications
  int threads = 1;
};

struct BootstrapTelemetry {
  int redraws = 0;
};

namespace detail {

constexpr std::uint64_t kBootstrapTag = 0xb001ULL;

}  // namespace detail

// Fills stack.lambda_qq, its Cholesky factor, and per-target lambda_theta.
inline BootstrapTelemetry bootstrap_lambda(ReducedFormStack& stack, const VarEstimate& est,
                                           const BootstrapConfig& cfg) {
  const int m = stack.m();
  if (cfg.n_lambda < 2) throw config_error("bootstrap: n_lambda must be at least 2");
  if (cfg.n_lambda < m + 1)
    throw config_error("bootstrap: n_lambda must exceed dim(phi_q) = " + std::to_string(m) +
                       " for a full-rank covariance");

  const int T = est.sample_size;
  const double root_t = std::sqrt(static_cast<double>(T));
  const VarProcess proc = est.process();
  const int n_targets = static_cast<int>(stack.targets.size());

  Matrix devs(cfg.n_lambda, m);
  std::vector<Matrix> target_devs(n_targets, Matrix(cfg.n_lambda, stack.n));
  std::vector<int> attempts_used(cfg.n_lambda, 0);

  SimulateOptions sim_opts;
  sim_opts.allow_unstable = true;  // mechanical bootstrap; mild explosiveness is fine

  parallel_for(
      static_cast<std::size_t>(cfg.n_lambda),
      [&](std::size_t b) {
        for (int attempt = 0;; ++attempt) {
          if (attempt >= cfg.max_attempts_per_rep)
            throw numeric_error("bootstrap: replication " + std::to_string(b) +
                                " kept producing degenerate samples");
          Rng rng = derive_rng(cfg.seed, {detail::kBootstrapTag, static_cast<std::uint64_t>(b),
                                          static_cast<std::uint64_t>(attempt)});
          TimeSeriesData sample;
          sample.values = simulate_var(proc, T, rng, sim_opts);
          try {
            const VarEstimate rep = estimate_ols(sample, est.spec);
            Vector phi_rep;
            Matrix theta_rep;
            fill_stack_values(rep, stack, phi_rep, theta_rep);
            devs.row(static_cast<Eigen::Index>(b)) = root_t * (phi_rep - stack.phi_q).transpose();
            for (int t = 0; t < n_targets; ++t)
              target_devs[t].row(static_cast<Eigen::Index>(b)) =
                  root_t * (theta_rep.row(t) - stack.phi_theta.row(t));
            attempts_used[b] = attempt;
            return;
          } catch (const numeric_error&) {
            continue;  // singular or degenerate replication: redraw
          }
        }
      },
      cfg.threads);

  BootstrapTelemetry telemetry;
  for (int a : attempts_used) telemetry.redraws += a;

  stack.lambda_qq = devs.transpose() * devs / static_cast<double>(cfg.n_lambda);
  Eigen::LLT<Matrix> llt(stack.lambda_qq);
  if (llt.info() != Eigen::Success)
    throw numeric_error(
        "bootstrap: covariance of the stacked coefficients is rank deficient; the "
        "inference requires it positive definite (raise n_lambda above dim(phi_q), "
        "or drop redundant restrictions)");
  stack.lambda_qq_chol = llt.matrixL();

  stack.lambda_theta.clear();
  stack.lambda_theta.reserve(n_targets);
  for (int t = 0; t < n_targets; ++t)
    stack.lambda_theta.push_back(target_devs[t].transpose() * target_devs[t] /
                                 static_cast<double>(cfg.n_lambda));
  return telemetry;
}

}  // namespace svarsets
