// Moment-inequality objective, selection, and simulated critical values.

#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace svarsets;

namespace {

// Stack on simulated two-variable data with impact restrictions.
struct Setup {
  VarEstimate est;
  ReducedFormStack stack;
};

Setup make_setup(std::uint64_t seed, int T, int p = 0, int n_lambda = 200,
                 std::vector<SignRestriction> signs = {{0, 0, SignDirection::NonNegative, false},
                                                       {1, 0, SignDirection::NonNegative, false}}) {
  Rng rng = derive_rng(seed, {1});
  const VarProcess proc = testsup::random_process(2, p, rng);
  const TimeSeriesData data = testsup::simulate_data(proc, T, rng);
  Setup s;
  s.est = estimate_ols(data, {2, p, Deterministics::Intercept});
  RestrictionSet rs;
  rs.signs = std::move(signs);
  s.stack = build_phi(s.est, rs, {});
  BootstrapConfig cfg;
  cfg.n_lambda = n_lambda;
  cfg.seed = seed + 17;
  bootstrap_lambda(s.stack, s.est, cfg);
  return s;
}

MomentDiagnostics one_binding_row() {
  MomentDiagnostics diag;
  diag.kept = {0};
  diag.is_equality = {0};
  diag.binding = {1};
  diag.r1 = 1;
  diag.r2 = 0;
  diag.a_hat_t = Matrix::Identity(1, 1);
  diag.xi = Vector::Zero(1);
  diag.d_diag = Vector::Ones(1);
  return diag;
}

}  // namespace

TEST_CASE("selection threshold grows like log log T") {
  CHECK(kappa_value(100) == Catch::Approx(1.96 * std::log(std::log(100.0))).epsilon(1e-14));
  CHECK(kappa_value(100) == Catch::Approx(2.9932720665834862).epsilon(1e-12));
  CHECK(kappa_value(10000) > kappa_value(100));
  CHECK_THROWS_AS(kappa_value(2), config_error);
}

TEST_CASE("single binding moment reproduces the analytic critical value") {
  // one standardized moment: the simulated statistic is min(Z,0)^2, whose
  // 95th percentile equals the 90th percentile of chi-square(1) = 2.7055
  const MomentDiagnostics diag = one_binding_row();
  const Matrix panel = draw_panel(10000, 1, static_cast<std::uint64_t>(314));
  const double c = critical_value(diag, panel, 0.05);
  CHECK(c == Catch::Approx(2.705543454095404).margin(0.1));
}

TEST_CASE("no binding moments give a zero critical value") {
  MomentDiagnostics diag = one_binding_row();
  diag.binding = {0};
  diag.r1 = 0;
  diag.r2 = 1;
  const Matrix panel = draw_panel(500, 1, static_cast<std::uint64_t>(1));
  CHECK(critical_value(diag, panel, 0.05) == 0.0);
}

TEST_CASE("critical values decrease as the level loosens") {
  const MomentDiagnostics diag = one_binding_row();
  const Matrix panel = draw_panel(4000, 1, static_cast<std::uint64_t>(2));
  const auto c = critical_values(diag, panel, {0.01, 0.05, 0.10});
  CHECK(c[0] >= c[1]);
  CHECK(c[1] >= c[2]);
  CHECK(c[0] == Catch::Approx(critical_value(diag, panel, 0.01)));
}

TEST_CASE("identity objective equals the negative-part sum of xi") {
  const Setup s = make_setup(31, 150);
  Rng rng = derive_rng(31, {9});
  for (int rep = 0; rep < 50; ++rep) {
    const Vector q = testsup::random_unit(2, rng);
    MomentDiagnostics diag;
    const double g = objective_g(s.stack, q, {}, &diag);
    double direct = 0.0;
    for (Eigen::Index j = 0; j < diag.xi.size(); ++j)
      direct += std::min(diag.xi(j), 0.0) * std::min(diag.xi(j), 0.0);
    CHECK(g == Catch::Approx(direct).margin(1e-12));
    CHECK(diag.g == Catch::Approx(g));
    // selection: binding iff below the threshold
    for (std::size_t j = 0; j < diag.kept.size(); ++j)
      CHECK(static_cast<bool>(diag.binding[j]) == (diag.xi(static_cast<Eigen::Index>(j)) < diag.kappa));
    CHECK(diag.r1 + diag.r2 == static_cast<int>(diag.kept.size()));
  }
}

TEST_CASE("single-row problems make both weighting schemes agree") {
  const Setup s = make_setup(32, 150, 0, 200,
                             {{1, 0, SignDirection::NonNegative, false}});
  Rng rng = derive_rng(32, {9});
  for (int rep = 0; rep < 25; ++rep) {
    const Vector q = testsup::random_unit(2, rng);
    MomentOptions ident;
    MomentOptions invcorr;
    invcorr.scheme = WeightScheme::InverseCorrelation;
    CHECK(objective_g(s.stack, q, ident) ==
          Catch::Approx(objective_g(s.stack, q, invcorr)).margin(1e-10));
  }
}

TEST_CASE("inverse-correlation objective solves the weighted projection") {
  const Setup s = make_setup(33, 200);
  Rng rng = derive_rng(33, {9});
  MomentOptions opts;
  opts.scheme = WeightScheme::InverseCorrelation;
  for (int rep = 0; rep < 25; ++rep) {
    const Vector q = testsup::random_unit(2, rng);
    MomentDiagnostics diag;
    const double g = objective_g(s.stack, q, opts, &diag);
    REQUIRE(diag.omega_inv.rows() == diag.xi.size());
    // verify against a direct solve of min_{v >= 0} (xi - v)' B (xi - v)
    const NnlsResult direct = nnls_project(diag.xi, diag.omega_inv);
    CHECK(g == Catch::Approx(direct.objective).margin(1e-10));
    CHECK(g >= -1e-12);
  }
}

TEST_CASE("equality rows contribute squared deviations of either sign") {
  Rng rng = derive_rng(34, {1});
  const VarProcess proc = testsup::random_process(2, 0, rng);
  const TimeSeriesData data = testsup::simulate_data(proc, 150, rng);
  const VarEstimate est = estimate_ols(data, {2, 0, Deterministics::Intercept});
  RestrictionSet rs;
  rs.signs.push_back({0, 0, SignDirection::NonNegative, false});
  std::vector<EqualityRestriction> eqs;
  eqs.push_back({1, 0, false});
  ReducedFormStack stack = build_phi(est, rs, {}, eqs);
  BootstrapConfig cfg;
  cfg.n_lambda = 200;
  cfg.seed = 77;
  bootstrap_lambda(stack, est, cfg);

  for (int rep = 0; rep < 25; ++rep) {
    const Vector q = testsup::random_unit(2, rng);
    MomentDiagnostics diag;
    const double g = objective_g_eq(stack, q, {}, &diag);
    double direct = 0.0;
    bool saw_equality = false;
    for (std::size_t j = 0; j < diag.kept.size(); ++j) {
      const double x = diag.xi(static_cast<Eigen::Index>(j));
      if (diag.is_equality[j]) {
        direct += x * x;  // penalized in both directions
        saw_equality = true;
        CHECK(static_cast<bool>(diag.binding[j]));  // equalities always bind
      } else {
        direct += std::min(x, 0.0) * std::min(x, 0.0);
      }
    }
    CHECK(saw_equality);
    CHECK(g == Catch::Approx(direct).margin(1e-12));
  }
}

TEST_CASE("objective and critical value are invariant to coefficient scale") {
  const Setup s = make_setup(35, 150, 1);
  ReducedFormStack scaled = s.stack;
  const double c = 37.5;
  scaled.phi_q *= c;
  scaled.phi_theta *= c;
  scaled.lambda_qq *= c * c;
  scaled.lambda_qq_chol *= c;
  for (auto& lt : scaled.lambda_theta) lt *= c * c;

  Rng rng = derive_rng(35, {9});
  const Matrix panel = draw_panel(200, s.stack.m(), static_cast<std::uint64_t>(4));
  for (int rep = 0; rep < 25; ++rep) {
    const Vector q = testsup::random_unit(2, rng);
    for (const WeightScheme scheme : {WeightScheme::Identity, WeightScheme::InverseCorrelation}) {
      MomentOptions opts;
      opts.scheme = scheme;
      MomentDiagnostics da, db;
      const double ga = objective_g(s.stack, q, opts, &da);
      const double gb = objective_g(scaled, q, opts, &db);
      CHECK(gb == Catch::Approx(ga).margin(1e-8 * (1.0 + ga)));
      CHECK((da.xi - db.xi).cwiseAbs().maxCoeff() < 1e-8);
      const double ca = critical_value(da, panel, 0.05, opts);
      const double cb = critical_value(db, panel, 0.05, opts);
      CHECK(cb == Catch::Approx(ca).margin(1e-8 * (1.0 + ca)));
    }
  }
}

TEST_CASE("panel draws are reproducible and shaped correctly") {
  const Matrix a = draw_panel(50, 3, static_cast<std::uint64_t>(11));
  const Matrix b = draw_panel(50, 3, static_cast<std::uint64_t>(11));
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.rows() == 50);
  CHECK(a.cols() == 3);
  CHECK_THROWS_AS(draw_panel(0, 3, static_cast<std::uint64_t>(1)), config_error);
}
