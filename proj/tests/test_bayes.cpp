// Posterior acceptance sampler and pointwise credible bands.

#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace svarsets;

namespace {

TimeSeriesData make_data(std::uint64_t seed, int T, int n = 2, int p = 1) {
  Rng rng = derive_rng(seed, {1});
  const VarProcess proc = testsup::random_process(n, p, rng);
  return testsup::simulate_data(proc, T, rng);
}

}  // namespace

TEST_CASE("unrestricted sampling accepts every proposal") {
  const TimeSeriesData data = make_data(61, 120);
  BayesConfig cfg;
  cfg.n_draws = 150;
  cfg.horizon = 4;
  cfg.seed = 62;
  const BayesResult res = posterior_sample(data, {2, 1, Deterministics::Intercept}, {}, cfg);
  CHECK(res.attempts == 150);
  CHECK(res.draws.size() == 150);
  CHECK(res.acceptance_rate() == 1.0);
  CHECK_FALSE(res.hit_attempt_cap);
  for (const PosteriorDraw& d : res.draws) {
    CHECK(d.q.norm() == Catch::Approx(1.0).epsilon(1e-12));
    REQUIRE(d.irf.rows() == 2);
    REQUIRE(d.irf.cols() == 5);
    // impact responses come from the drawn innovation factor
    CHECK((d.irf.col(0) - d.sigma_tr * d.q).cwiseAbs().maxCoeff() < 1e-12);
    // lower-triangular factor with positive diagonal
    CHECK(d.sigma_tr(0, 1) == 0.0);
    CHECK(d.sigma_tr(0, 0) > 0.0);
    CHECK(d.sigma_tr(1, 1) > 0.0);
  }
}

TEST_CASE("accepted draws satisfy the declared restrictions") {
  const TimeSeriesData data = make_data(63, 200);
  RestrictionSet rs;
  rs.signs.push_back({0, 0, SignDirection::NonNegative, false});
  rs.signs.push_back({1, 1, SignDirection::NonPositive, false});
  BayesConfig cfg;
  cfg.n_draws = 200;
  cfg.horizon = 3;
  cfg.seed = 64;
  const BayesResult res = posterior_sample(data, {2, 1, Deterministics::Intercept}, rs, cfg);
  REQUIRE(res.draws.size() == 200);
  CHECK(res.attempts >= 200);
  for (const PosteriorDraw& d : res.draws) {
    CHECK(d.irf(0, 0) >= 0.0);
    CHECK(d.irf(1, 1) <= 0.0);
  }
  // the sign-restricted credible band inherits the impact sign
  const auto band = credible_band(res.draws, TargetKind::Irf, 0, 0.90);
  REQUIRE(band.size() == 4);
  CHECK(band[0].lo >= 0.0);
}

TEST_CASE("zero restrictions pin the leading coordinates of the direction") {
  const TimeSeriesData data = make_data(65, 200, 3);
  RestrictionSet rs;
  rs.zero_count = 1;
  rs.signs.push_back({1, 0, SignDirection::NonNegative, false});
  BayesConfig cfg;
  cfg.n_draws = 120;
  cfg.seed = 66;
  const BayesResult res = posterior_sample(data, {3, 1, Deterministics::Intercept}, rs, cfg);
  REQUIRE(res.draws.size() == 120);
  for (const PosteriorDraw& d : res.draws) {
    CHECK(d.q(0) == 0.0);
    CHECK(d.q.norm() == Catch::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("low acceptance aborts at the checkpoint") {
  const TimeSeriesData data = make_data(67, 150);
  RestrictionSet rs;
  rs.signs.push_back({0, 0, SignDirection::NonNegative, false});
  BayesConfig cfg;
  cfg.n_draws = 100000;
  cfg.seed = 68;
  cfg.acceptance_check_at = 400;
  cfg.min_acceptance = 0.999;  // a single sign restriction accepts roughly half
  CHECK_THROWS_AS(posterior_sample(data, {2, 1, Deterministics::Intercept}, rs, cfg),
                  numeric_error);
}

TEST_CASE("the attempt cap stops the sampler without throwing") {
  const TimeSeriesData data = make_data(69, 150);
  RestrictionSet rs;
  rs.signs.push_back({0, 0, SignDirection::NonNegative, false});
  BayesConfig cfg;
  cfg.n_draws = 100000;
  cfg.seed = 70;
  cfg.max_attempts = 60;
  const BayesResult res = posterior_sample(data, {2, 1, Deterministics::Intercept}, rs, cfg);
  CHECK(res.hit_attempt_cap);
  CHECK(res.attempts <= 60);
  CHECK(res.draws.size() < 100000);
}

TEST_CASE("sampling is reproducible by seed") {
  const TimeSeriesData data = make_data(71, 150);
  RestrictionSet rs;
  rs.signs.push_back({0, 0, SignDirection::NonNegative, false});
  BayesConfig cfg;
  cfg.n_draws = 60;
  cfg.horizon = 2;
  cfg.seed = 72;
  const BayesResult a = posterior_sample(data, {2, 1, Deterministics::Intercept}, rs, cfg);
  const BayesResult b = posterior_sample(data, {2, 1, Deterministics::Intercept}, rs, cfg);
  REQUIRE(a.draws.size() == b.draws.size());
  CHECK(a.attempts == b.attempts);
  for (std::size_t i = 0; i < a.draws.size(); ++i) {
    CHECK((a.draws[i].q - b.draws[i].q).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.draws[i].irf - b.draws[i].irf).cwiseAbs().maxCoeff() == 0.0);
  }
  cfg.seed = 73;
  const BayesResult c = posterior_sample(data, {2, 1, Deterministics::Intercept}, rs, cfg);
  REQUIRE(!c.draws.empty());
  CHECK((a.draws[0].q - c.draws[0].q).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("posterior concentrates near the estimated innovation covariance") {
  const TimeSeriesData data = make_data(74, 1500);
  const VarEstimate est = estimate_ols(data, {2, 1, Deterministics::Intercept});
  BayesConfig cfg;
  cfg.n_draws = 400;
  cfg.seed = 75;
  const BayesResult res = posterior_sample(data, {2, 1, Deterministics::Intercept}, {}, cfg);
  Matrix mean_sigma = Matrix::Zero(2, 2);
  for (const PosteriorDraw& d : res.draws)
    mean_sigma += d.sigma_tr * d.sigma_tr.transpose();
  mean_sigma /= static_cast<double>(res.draws.size());
  CHECK((mean_sigma - est.sigma_u).cwiseAbs().maxCoeff() <
        0.15 * est.sigma_u.cwiseAbs().maxCoeff());
}

TEST_CASE("credible bands are equal-tailed and widen with the level") {
  const TimeSeriesData data = make_data(76, 200);
  BayesConfig cfg;
  cfg.n_draws = 300;
  cfg.horizon = 3;
  cfg.seed = 77;
  const BayesResult res = posterior_sample(data, {2, 1, Deterministics::Intercept}, {}, cfg);

  const auto full = credible_band(res.draws, TargetKind::Irf, 0, 1.0);
  REQUIRE(full.size() == 4);
  for (int h = 0; h < 4; ++h) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const PosteriorDraw& d : res.draws) {
      lo = std::min(lo, d.irf(0, h));
      hi = std::max(hi, d.irf(0, h));
    }
    // level one is the min/max envelope of the accepted paths
    CHECK(full[static_cast<std::size_t>(h)].lo == Catch::Approx(lo).epsilon(1e-12));
    CHECK(full[static_cast<std::size_t>(h)].hi == Catch::Approx(hi).epsilon(1e-12));
  }

  const auto mid = credible_band(res.draws, TargetKind::Irf, 0, 0.90);
  const auto narrow = credible_band(res.draws, TargetKind::Irf, 0, 0.50);
  for (int h = 0; h < 4; ++h) {
    const auto& f = full[static_cast<std::size_t>(h)];
    const auto& m = mid[static_cast<std::size_t>(h)];
    const auto& s = narrow[static_cast<std::size_t>(h)];
    CHECK(f.lo <= m.lo);
    CHECK(m.lo <= s.lo);
    CHECK(s.hi <= m.hi);
    CHECK(m.hi <= f.hi);
  }

  // cumulative responses and variance shares reduce to the right scalars
  const auto cum = credible_band(res.draws, TargetKind::CumulativeIrf, 1, 0.90);
  REQUIRE(cum.size() == 4);
  const auto share = credible_band(res.draws, TargetKind::VarianceShare, 0, 0.90);
  REQUIRE(share.size() == 1);
  CHECK(share[0].lo >= 0.0);
  CHECK(share[0].hi <= 1.0);
}

TEST_CASE("credible bands refuse thin samples") {
  const TimeSeriesData data = make_data(78, 150);
  BayesConfig cfg;
  cfg.n_draws = 40;
  cfg.horizon = 1;
  cfg.seed = 79;
  const BayesResult res = posterior_sample(data, {2, 1, Deterministics::Intercept}, {}, cfg);
  CHECK_THROWS_AS(credible_band(res.draws, TargetKind::Irf, 0, 0.90), config_error);
  CHECK_NOTHROW(credible_band(res.draws, TargetKind::Irf, 0, 0.90, 10));
  CHECK_THROWS_AS(credible_band(res.draws, TargetKind::Irf, 5, 0.90, 10), config_error);
  CHECK_THROWS_AS(credible_band(res.draws, TargetKind::Irf, 0, 0.0, 10), config_error);
}

TEST_CASE("sampler validates its configuration") {
  const TimeSeriesData data = make_data(80, 120);
  BayesConfig bad;
  bad.n_draws = 0;
  CHECK_THROWS_AS(posterior_sample(data, {2, 1, Deterministics::Intercept}, {}, bad),
                  config_error);
  BayesConfig neg;
  neg.n_draws = 10;
  neg.horizon = -1;
  CHECK_THROWS_AS(posterior_sample(data, {2, 1, Deterministics::Intercept}, {}, neg),
                  config_error);
  RestrictionSet out_of_range;
  out_of_range.signs.push_back({5, 0, SignDirection::NonNegative, false});
  CHECK_THROWS_AS(posterior_sample(data, {2, 1, Deterministics::Intercept}, out_of_range, {}),
                  config_error);
  RestrictionSet bad_zero;
  bad_zero.zero_count = 2;
  CHECK_THROWS_AS(posterior_sample(data, {2, 1, Deterministics::Intercept}, bad_zero, {}),
                  config_error);
}

TEST_CASE("scalar inverse-wishart draws match the analytic mean") {
  // IW(s, dof) in one dimension is s / chi-square(dof); mean s / (dof - 2)
  const double s = 5.0;
  const int dof = 10;
  Rng rng = derive_rng(81, {1});
  Matrix scale(1, 1);
  scale(0, 0) = s;
  double sum = 0.0;
  const int reps = 4000;
  for (int i = 0; i < reps; ++i) {
    const Matrix l = detail::draw_inverse_wishart_chol(scale, dof, rng);
    sum += l(0, 0) * l(0, 0);
  }
  CHECK(sum / reps == Catch::Approx(s / (dof - 2.0)).margin(0.05));
  CHECK_THROWS_AS(detail::draw_wishart_factor(Matrix::Identity(3, 3), 2, rng), config_error);
}

TEST_CASE("matric-normal draws have the separable covariance") {
  // E[B_ij B_kl] = R_ik * C_jl for zero-centered draws
  Matrix r(2, 2), c(2, 2);
  r << 2.0, 0.5, 0.5, 1.0;
  c << 1.0, 0.3, 0.3, 0.5;
  const Matrix l_row = Eigen::LLT<Matrix>(r).matrixL();
  const Matrix l_col = Eigen::LLT<Matrix>(c).matrixL();
  Rng rng = derive_rng(82, {1});
  const int reps = 20000;
  double m_0000 = 0.0, m_0101 = 0.0, m_0010 = 0.0, m_0001 = 0.0, mean00 = 0.0;
  for (int i = 0; i < reps; ++i) {
    const Matrix b = detail::draw_matric_normal(Matrix::Zero(2, 2), l_row, l_col, rng);
    m_0000 += b(0, 0) * b(0, 0);
    m_0101 += b(0, 1) * b(0, 1);
    m_0010 += b(0, 0) * b(1, 0);
    m_0001 += b(0, 0) * b(0, 1);
    mean00 += b(0, 0);
  }
  CHECK(m_0000 / reps == Catch::Approx(r(0, 0) * c(0, 0)).margin(0.08));
  CHECK(m_0101 / reps == Catch::Approx(r(0, 0) * c(1, 1)).margin(0.08));
  CHECK(m_0010 / reps == Catch::Approx(r(0, 1) * c(0, 0)).margin(0.08));
  CHECK(m_0001 / reps == Catch::Approx(r(0, 0) * c(0, 1)).margin(0.08));
  CHECK(mean00 / reps == Catch::Approx(0.0).margin(0.05));
}
