// Command-line front end: reduced-form estimation, frequentist confidence
// bands with plug-in identified-set estimates, Bayesian comparison bands,
// Monte Carlo coverage experiments, and population identified sets.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 numerical
// failure, 3 empty joint confidence set on a band run.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "svarsets/svarsets.hpp"

namespace fs = std::filesystem;
using nlohmann::json;  // objects serialize with sorted keys: deterministic
using namespace svarsets;

namespace {

// ------------------------------------------------------------- helpers --

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json json_matrix(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json json_interval(const Interval& iv) {
  if (iv.empty) return json{{"empty", true}};
  return json{{"lo", iv.lo}, {"hi", iv.hi}};
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write file: " + path);
  out << text;
}

std::string format_num(double v) { return svarsets::detail::format_double(v); }

json versions_json() {
  return json{{"library", svarsets::version},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                            std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
              {"compiler", __VERSION__}};
}

// --------------------------------------------------- common run options --

struct CommonOpts {
  std::string config_path;
  std::string out_dir;  // empty: use the config's [output] dir
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> alpha1;
  std::optional<double> alpha2;
  std::optional<int> n_q;
  std::optional<int> n_z;
  std::optional<int> n_lambda;
};

void add_override_flags(CLI::App* cmd, CommonOpts& co) {
  cmd->add_option("--seed", co.seed, "Override the configured random seed");
  cmd->add_option("--threads", co.threads, "Override the configured worker-thread count");
  cmd->add_option("--alpha1", co.alpha1, "Override the direction-set level alpha1");
  cmd->add_option("--alpha2", co.alpha2, "Override the target-band level alpha2");
  cmd->add_option("--nq", co.n_q, "Override the number of grid directions");
  cmd->add_option("--nz", co.n_z, "Override the critical-value simulation draws");
  cmd->add_option("--nlambda", co.n_lambda, "Override the bootstrap replications");
  cmd->add_option("--out", co.out_dir, "Override the output directory");
}

void apply_overrides(RunConfig& cfg, const CommonOpts& co) {
  if (co.seed) cfg.seed = *co.seed;
  if (co.threads) cfg.threads = *co.threads;
  if (co.alpha1) cfg.alpha1 = *co.alpha1;
  if (co.alpha2) cfg.alpha2 = *co.alpha2;
  if (co.n_q) cfg.n_q = *co.n_q;
  if (co.n_z) cfg.n_z = *co.n_z;
  if (co.n_lambda) cfg.n_lambda = *co.n_lambda;
  if (!co.out_dir.empty()) cfg.out_dir = co.out_dir;
  if (cfg.alpha1 <= 0.0 || cfg.alpha1 >= 1.0 || cfg.alpha2 <= 0.0 || cfg.alpha2 >= 1.0)
    throw config_error("alpha levels must lie in (0, 1)");
  if (cfg.threads < 1) throw config_error("threads must be >= 1");
}

struct LoadedRun {
  RunConfig cfg;
  std::string config_text;
  std::string data_text;
  LoadedSeries data;  // after transforms
  VarSpec spec;
};

LoadedRun load_run(const CommonOpts& co) {
  LoadedRun run;
  run.config_text = svarsets::detail::read_file(co.config_path);
  run.cfg = parse_run_config(parse_ini(run.config_text));
  apply_overrides(run.cfg, co);

  run.data_text = svarsets::detail::read_file(run.cfg.data_path);
  LoadedSeries raw = load_series_csv(run.cfg.data_path);

  std::vector<std::vector<TransformKind>> pipelines(
      static_cast<std::size_t>(raw.data.n()));
  std::vector<bool> assigned(pipelines.size(), false);
  for (const auto& [name, steps] : run.cfg.transforms) {
    const int idx = resolve_variable(name, raw.data.names);
    if (assigned[static_cast<std::size_t>(idx)])
      throw config_error("config: duplicate transform pipeline for variable '" + name + "'");
    assigned[static_cast<std::size_t>(idx)] = true;
    pipelines[static_cast<std::size_t>(idx)] = steps;
  }
  run.data = apply_transforms(raw, pipelines);

  run.spec.n = run.data.data.n();
  run.spec.p = run.cfg.lags;
  run.spec.det = run.cfg.det;
  return run;
}

json manifest_base(const std::string& command, const LoadedRun& run) {
  const RunConfig& cfg = run.cfg;
  json m;
  m["command"] = command;
  m["config_hash"] = hex64(fnv1a64(run.config_text));
  m["data_hash"] = hex64(fnv1a64(run.data_text));
  m["seed"] = cfg.seed;
  m["alpha1"] = cfg.alpha1;
  m["alpha2"] = cfg.alpha2;
  m["n_q"] = cfg.n_q;
  m["n_z"] = cfg.n_z;
  m["n_lambda"] = cfg.n_lambda;
  m["lags"] = cfg.lags;
  m["deterministics"] = cfg.det == Deterministics::None ? "none"
                        : cfg.det == Deterministics::Intercept ? "intercept"
                                                               : "intercept-trend";
  m["weight_scheme"] =
      cfg.scheme == WeightScheme::Identity ? "identity" : "inverse-correlation";
  m["share_draws"] = cfg.share_draws;
  m["zero_impacts"] = cfg.zero_impacts;
  m["observations"] = run.data.data.T();
  m["variables"] = run.data.data.names;
  m["versions"] = versions_json();
  return m;
}

void write_outputs(const std::string& out_dir,
                   const std::vector<std::pair<std::string, std::string>>& files) {
  fs::create_directories(out_dir);
  for (const auto& [name, text] : files)
    write_text_file((fs::path(out_dir) / name).string(), text);
}

// ----------------------------------------------------------- estimate --

int run_estimate(const CommonOpts& co, int p_max) {
  LoadedRun run = load_run(co);
  const VarEstimate est = estimate_ols(run.data.data, run.spec);

  std::ostringstream text;
  text << "variables:";
  for (const auto& name : run.data.data.names) text << ' ' << name;
  text << "  (n = " << run.spec.n << ")\n";
  text << "observations: " << run.data.data.T() << "  (effective "
       << run.data.data.T() - run.spec.p << ")\n";
  text << "lags: " << run.spec.p << "   deterministics: "
       << (run.spec.det == Deterministics::None ? "none"
           : run.spec.det == Deterministics::Intercept ? "intercept"
                                                       : "intercept-trend")
       << "\n";
  if (run.spec.p > 0)
    text << "spectral radius: " << format_num(spectral_radius(companion_matrix(est.lag_coeffs)))
         << "\n";
  text << "innovation covariance sigma_u:\n";
  for (int i = 0; i < run.spec.n; ++i) {
    text << " ";
    for (int j = 0; j < run.spec.n; ++j) text << ' ' << format_num(est.sigma_u(i, j));
    text << "\n";
  }
  for (int lag = 0; lag < run.spec.p; ++lag) {
    text << "A_" << lag + 1 << ":\n";
    for (int i = 0; i < run.spec.n; ++i) {
      text << " ";
      for (int j = 0; j < run.spec.n; ++j)
        text << ' ' << format_num(est.lag_coeffs[static_cast<std::size_t>(lag)](i, j));
      text << "\n";
    }
  }

  const int feasible_pmax =
      std::min(p_max, (run.data.data.T() - run.spec.regressors() - 1) / std::max(run.spec.n, 1));
  const auto bic = lag_order_bic(run.data.data, std::max(feasible_pmax, 0), run.spec.det);
  int best = 0;
  for (std::size_t i = 1; i < bic.size(); ++i)
    if (bic[i].bic < bic[static_cast<std::size_t>(best)].bic) best = static_cast<int>(i);
  text << "BIC by lag order (common sample; * marks the minimum):\n";
  text << "  p   BIC\n";
  for (const auto& entry : bic)
    text << "  " << entry.lags << "   " << format_num(entry.bic)
         << (entry.lags == bic[static_cast<std::size_t>(best)].lags ? " *" : "") << "\n";

  json summary;
  summary["sigma_u"] = json_matrix(est.sigma_u);
  summary["sigma_tr"] = json_matrix(est.sigma_tr);
  json lag_json = json::array();
  for (const auto& a : est.lag_coeffs) lag_json.push_back(json_matrix(a));
  summary["lag_coeffs"] = std::move(lag_json);
  summary["det_coeffs"] = json_matrix(est.det_coeffs);
  json bic_json = json::array();
  for (const auto& entry : bic) bic_json.push_back(json{{"lags", entry.lags}, {"bic", entry.bic}});
  summary["bic"] = std::move(bic_json);
  summary["bic_minimum"] = bic[static_cast<std::size_t>(best)].lags;

  json manifest = manifest_base("estimate", run);
  write_outputs(run.cfg.out_dir, {{"manifest.json", manifest.dump(2) + "\n"},
                                  {"estimate.json", summary.dump(2) + "\n"},
                                  {"estimate.txt", text.str()}});
  std::cout << text.str();
  return 0;
}

// -------------------------------------------------------------- bands --

int run_bands(const CommonOpts& co, bool with_bayes) {
  LoadedRun run = load_run(co);
  const RunConfig& cfg = run.cfg;
  const int n = run.spec.n;

  ResolvedRestrictions rr = resolve_restrictions(cfg, run.data.data.names);
  if (rr.restrictions.signs.empty() && rr.restrictions.zero_count == 0)
    throw config_error("bands: declare at least one restriction in [restrictions]");
  if (rr.targets.empty())
    throw config_error("bands: declare at least one target in [targets]");

  const VarEstimate est = estimate_ols(run.data.data, run.spec);
  ReducedFormStack stack = build_phi(est, rr.restrictions, rr.targets);

  BootstrapConfig bs;
  bs.n_lambda = cfg.n_lambda;
  bs.seed = derive_seed(cfg.seed, {0xb007ULL});
  bs.threads = cfg.threads;
  bootstrap_lambda(stack, est, bs);

  const int restricted_dim = n - rr.restrictions.zero_count;
  const int n_q = cfg.n_q > 0 ? cfg.n_q : (restricted_dim == 2 ? 629 : 20000);
  const QGrid grid =
      make_restricted_grid(n, rr.restrictions.zero_count, n_q, derive_seed(cfg.seed, {0x96dULL}));

  CsQConfig cq;
  cq.alpha1 = cfg.alpha1;
  cq.n_z = cfg.n_z > 0 ? cfg.n_z : 1000;
  cq.seed = derive_seed(cfg.seed, {0x5a1ULL});
  cq.share_draws_across_q = cfg.share_draws;
  cq.moment.scheme = cfg.scheme;
  cq.threads = cfg.threads;
  const QGridResult gr = cs_q(stack, grid, cq);

  // Bayesian comparison bands per (kind, variable), pointwise over horizons.
  std::map<std::pair<int, int>, std::vector<Interval>> bayes_bands;
  double acceptance = std::numeric_limits<double>::quiet_NaN();
  if (with_bayes) {
    int max_h = 0;
    for (const auto& t : rr.targets)
      if (t.kind != TargetKind::VarianceShare) max_h = std::max(max_h, t.horizon);
    BayesConfig bc;
    bc.n_draws = cfg.bayes_draws;
    bc.horizon = max_h;
    bc.seed = derive_seed(cfg.seed, {0xba7e5ULL});
    const BayesResult br = posterior_sample(run.data.data, run.spec, rr.restrictions, bc);
    acceptance = br.acceptance_rate();
    for (const auto& t : rr.targets) {
      const auto key = std::make_pair(static_cast<int>(t.kind), t.variable);
      if (bayes_bands.find(key) == bayes_bands.end())
        bayes_bands[key] = credible_band(br.draws, t.kind, t.variable, cfg.bayes_level);
    }
  }

  std::vector<BandRow> rows;
  rows.reserve(rr.targets.size());
  for (std::size_t t = 0; t < rr.targets.size(); ++t) {
    BandRow row;
    row.target = rr.target_labels[t];
    row.variable = rr.targets[t].variable + 1;
    row.horizon = rr.targets[t].horizon;
    row.fhat = estimated_identified_set_theta(stack, gr, static_cast<int>(t));
    row.cs = bonferroni_theta(stack, gr, static_cast<int>(t), cfg.alpha2);
    if (with_bayes) {
      const auto key = std::make_pair(static_cast<int>(rr.targets[t].kind),
                                      rr.targets[t].variable);
      const auto& band = bayes_bands.at(key);
      const std::size_t h = rr.targets[t].kind == TargetKind::VarianceShare
                                ? 0
                                : static_cast<std::size_t>(rr.targets[t].horizon);
      row.bayes = band.at(h);
    }
    rows.push_back(std::move(row));
  }

  json manifest = manifest_base(with_bayes ? "bayes" : "bands", run);
  manifest["grid_points"] = grid.count();
  manifest["fhat_points"] = gr.fhat_count;
  manifest["cs_points"] = gr.cs_count;
  if (with_bayes) {
    manifest["bayes_draws"] = cfg.bayes_draws;
    manifest["bayes_level"] = cfg.bayes_level;
    manifest["bayes_acceptance"] = acceptance;
  }

  write_outputs(cfg.out_dir, {{"manifest.json", manifest.dump(2) + "\n"},
                              {"bands.csv", band_csv_text(rows)}});

  std::cout << "directions: " << grid.count() << " grid points, " << gr.fhat_count
            << " satisfy the restrictions exactly, " << gr.cs_count
            << " in the joint confidence set\n";
  if (const auto arc = gr.arc_length(true))
    std::cout << "confidence-set arc length: " << format_num(*arc) << " rad ("
              << format_num(*arc / pi) << " pi)\n";
  if (with_bayes)
    std::cout << "posterior acceptance rate: " << format_num(acceptance) << "\n";
  std::cout << "bands written to " << (fs::path(cfg.out_dir) / "bands.csv").string() << "\n";

  if (gr.cs_empty()) {
    std::cerr << "warning: joint confidence set for the impact direction is empty; "
                 "the restrictions are rejected at this level\n";
    return 3;
  }
  return 0;
}

// ----------------------------------------------------------------- mc --

DesignId parse_design(const std::string& token) {
  if (token == "1") return DesignId::Bivariate1;
  if (token == "2") return DesignId::Bivariate2;
  if (token == "3") return DesignId::Bivariate3;
  if (token == "4") return DesignId::Bivariate4;
  if (token == "four-var" || token == "4var" || token == "fourvar") return DesignId::FourVar;
  throw config_error("unknown design '" + token + "' (expected 1, 2, 3, 4, or four-var)");
}

const char* design_name(DesignId id) {
  switch (id) {
    case DesignId::Bivariate1: return "bivariate-1";
    case DesignId::Bivariate2: return "bivariate-2";
    case DesignId::Bivariate3: return "bivariate-3";
    case DesignId::Bivariate4: return "bivariate-4";
    case DesignId::FourVar: return "four-var";
  }
  return "?";
}

struct McOpts {
  std::string design = "1";
  std::string horizons;  // empty: design default
  int T = 0;
  int n_sim = 500;
  double alpha1 = 0.05;
  double alpha2 = 0.05;
  int n_q = 0;
  int n_z = 0;
  int n_lambda = 1000;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string scheme = "identity";
  std::string out_dir = ".";
};

json mc_result_json(const McResult& res) {
  json j;
  j["design"] = design_name(res.design);
  j["T"] = res.T;
  j["n_sim"] = res.n_sim;
  j["alpha1"] = res.alpha1;
  j["alpha2"] = res.alpha2;
  j["n_empty_cs"] = res.n_empty_cs;
  j["n_empty_fhat"] = res.n_empty_fhat;
  j["cov_phi"] = res.cov_phi;
  if (std::isfinite(res.cov_q)) {
    j["cov_q"] = res.cov_q;
    j["cov_q_se"] = mc_standard_error(res.cov_q, res.n_sim);
    j["mean_binding_qstar"] = res.mean_binding_qstar;
  }
  if (std::isfinite(res.mean_arc_cs)) {
    j["mean_arc_cs"] = res.mean_arc_cs;
    j["mean_arc_cs_per_pi"] = res.mean_arc_cs / pi;
  }
  if (std::isfinite(res.mean_arc_fhat)) {
    j["mean_arc_fhat"] = res.mean_arc_fhat;
    j["mean_arc_fhat_per_pi"] = res.mean_arc_fhat / pi;
  }
  json thetas = json::array();
  for (const auto& s : res.theta) {
    json t;
    t["target"] = s.target;
    t["population"] = json_interval(s.population);
    t["cov_low"] = s.cov_low;
    t["cov_high"] = s.cov_high;
    t["cov_low_se"] = mc_standard_error(s.cov_low, res.n_sim);
    t["cov_high_se"] = mc_standard_error(s.cov_high, res.n_sim);
    t["mean_cs_length"] = s.mean_cs_length;
    t["mean_fhat_length"] = s.mean_fhat_length;
    thetas.push_back(std::move(t));
  }
  j["theta"] = std::move(thetas);
  return j;
}

int run_mc(const McOpts& mo) {
  std::vector<int> horizons;
  if (!mo.horizons.empty())
    horizons = svarsets::detail::parse_horizons(mo.horizons, "mc: --horizons");
  const McDesign design = make_design(parse_design(mo.design), horizons);

  McConfig cfg;
  cfg.T = mo.T;
  cfg.n_sim = mo.n_sim;
  cfg.alpha1 = mo.alpha1;
  cfg.alpha2 = mo.alpha2;
  cfg.n_lambda = mo.n_lambda;
  cfg.n_q = mo.n_q;
  cfg.n_z = mo.n_z;
  cfg.seed = mo.seed;
  cfg.threads = mo.threads;
  if (mo.scheme == "identity") cfg.moment.scheme = WeightScheme::Identity;
  else if (mo.scheme == "inverse-correlation") cfg.moment.scheme = WeightScheme::InverseCorrelation;
  else throw config_error("mc: --scheme must be identity or inverse-correlation");

  const McResult res = run_experiment(design, cfg);

  json result = mc_result_json(res);
  json params;
  params["command"] = "mc";
  params["design"] = design_name(res.design);
  params["horizons"] = mo.horizons;
  params["T"] = res.T;
  params["n_sim"] = res.n_sim;
  params["alpha1"] = res.alpha1;
  params["alpha2"] = res.alpha2;
  params["n_q"] = mo.n_q;
  params["n_z"] = mo.n_z;
  params["n_lambda"] = mo.n_lambda;
  params["seed"] = mo.seed;
  params["weight_scheme"] = mo.scheme;
  json manifest = params;
  manifest["config_hash"] = hex64(fnv1a64(params.dump()));
  manifest["versions"] = versions_json();

  write_outputs(mo.out_dir, {{"manifest.json", manifest.dump(2) + "\n"},
                             {"mc.json", result.dump(2) + "\n"}});

  std::cout << "design " << design_name(res.design) << ", T = " << res.T
            << ", replications = " << res.n_sim << ", alpha1 = " << res.alpha1
            << ", alpha2 = " << res.alpha2 << "\n";
  if (std::isfinite(res.cov_q))
    std::cout << "direction-set coverage at the boundary: " << format_num(res.cov_q) << " (se "
              << format_num(mc_standard_error(res.cov_q, res.n_sim)) << ")\n";
  if (std::isfinite(res.mean_arc_cs))
    std::cout << "mean confidence arc: " << format_num(res.mean_arc_cs / pi) << " pi (plug-in "
              << format_num(res.mean_arc_fhat / pi) << " pi)\n";
  if (std::isfinite(res.mean_binding_qstar))
    std::cout << "mean binding moments at the boundary: " << format_num(res.mean_binding_qstar)
              << "\n";
  std::cout << "coefficient-ellipsoid coverage: " << format_num(res.cov_phi) << "\n";
  std::cout << "empty confidence sets: " << res.n_empty_cs << " of " << res.n_sim << "\n";
  for (const auto& s : res.theta) {
    std::cout << "target " << s.target << ": coverage lo " << format_num(s.cov_low) << " hi "
              << format_num(s.cov_high) << ", mean band length " << format_num(s.mean_cs_length)
              << " (plug-in " << format_num(s.mean_fhat_length) << ")\n";
  }
  std::cout << "results written to " << (fs::path(mo.out_dir) / "mc.json").string() << "\n";
  return 0;
}

// ---------------------------------------------------- population-sets --

int run_population(const std::string& design_token, const std::string& horizons_text,
                   int grid_count, std::uint64_t grid_seed, const std::string& out_dir) {
  std::vector<int> horizons;
  if (!horizons_text.empty())
    horizons = svarsets::detail::parse_horizons(horizons_text, "population-sets: --horizons");
  const McDesign design = make_design(parse_design(design_token), horizons);
  const PopulationSets pop = population_sets(design, grid_count, grid_seed);

  json j;
  j["design"] = design_name(design.id);
  if (std::isfinite(pop.arc_length)) {
    j["arc_lo"] = pop.arc_lo;
    j["arc_hi"] = pop.arc_hi;
    j["arc_length"] = pop.arc_length;
    j["arc_length_per_pi"] = pop.arc_length / pi;
    json qs = json::array();
    for (Eigen::Index i = 0; i < pop.q_star.size(); ++i) qs.push_back(pop.q_star(i));
    j["q_star"] = std::move(qs);
  }
  json thetas = json::array();
  for (const auto& iv : pop.theta) thetas.push_back(json_interval(iv));
  j["theta"] = std::move(thetas);

  json params;
  params["command"] = "population-sets";
  params["design"] = design_name(design.id);
  params["horizons"] = horizons_text;
  params["grid_count"] = grid_count;
  params["grid_seed"] = grid_seed;
  json manifest = params;
  manifest["config_hash"] = hex64(fnv1a64(params.dump()));
  manifest["versions"] = versions_json();

  write_outputs(out_dir, {{"manifest.json", manifest.dump(2) + "\n"},
                          {"population.json", j.dump(2) + "\n"}});

  std::cout << "design " << design_name(design.id) << "\n";
  if (std::isfinite(pop.arc_length))
    std::cout << "identified arc: [" << format_num(pop.arc_lo) << ", " << format_num(pop.arc_hi)
              << "] rad, length " << format_num(pop.arc_length / pi) << " pi\n";
  for (std::size_t t = 0; t < pop.theta.size(); ++t) {
    const auto& iv = pop.theta[t];
    std::cout << "target " << t << ": ";
    if (iv.empty) std::cout << "(empty)\n";
    else std::cout << "[" << format_num(iv.lo) << ", " << format_num(iv.hi) << "]\n";
  }
  std::cout << "results written to " << (fs::path(out_dir) / "population.json").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence bands and identified-set estimates for sign-restricted SVARs"};
  app.require_subcommand(1);

  CommonOpts est_opts;
  int est_pmax = 8;
  CLI::App* cmd_estimate =
      app.add_subcommand("estimate", "Estimate the reduced-form VAR and report a lag-order table");
  cmd_estimate->add_option("--config", est_opts.config_path, "Run configuration file")->required();
  cmd_estimate->add_option("--pmax", est_pmax, "Largest lag order in the BIC table");
  cmd_estimate->add_option("--out", est_opts.out_dir, "Override the output directory");

  CommonOpts band_opts;
  CLI::App* cmd_bands = app.add_subcommand(
      "bands", "Frequentist confidence bands and plug-in identified-set estimates");
  cmd_bands->add_option("--config", band_opts.config_path, "Run configuration file")->required();
  add_override_flags(cmd_bands, band_opts);

  CommonOpts bayes_opts;
  CLI::App* cmd_bayes = app.add_subcommand(
      "bayes", "Frequentist bands plus Bayesian credible bands for comparison");
  cmd_bayes->add_option("--config", bayes_opts.config_path, "Run configuration file")->required();
  add_override_flags(cmd_bayes, bayes_opts);

  McOpts mc_opts;
  CLI::App* cmd_mc = app.add_subcommand("mc", "Monte Carlo coverage experiment");
  cmd_mc->add_option("--design", mc_opts.design, "Design: 1, 2, 3, 4, or four-var")->required();
  cmd_mc->add_option("--horizons", mc_opts.horizons,
                     "Restricted horizons for bivariate designs, e.g. 0,1 or 0..4");
  cmd_mc->add_option("--T", mc_opts.T, "Sample size (0: design default)");
  cmd_mc->add_option("--nsim", mc_opts.n_sim, "Monte Carlo replications");
  cmd_mc->add_option("--alpha1", mc_opts.alpha1, "Direction-set level");
  cmd_mc->add_option("--alpha2", mc_opts.alpha2, "Target-band level");
  cmd_mc->add_option("--nq", mc_opts.n_q, "Grid directions (0: design default)");
  cmd_mc->add_option("--nz", mc_opts.n_z, "Critical-value draws (0: default by design)");
  cmd_mc->add_option("--nlambda", mc_opts.n_lambda, "Bootstrap replications");
  cmd_mc->add_option("--seed", mc_opts.seed, "Random seed");
  cmd_mc->add_option("--threads", mc_opts.threads, "Worker threads");
  cmd_mc->add_option("--scheme", mc_opts.scheme, "Weighting: identity or inverse-correlation");
  cmd_mc->add_option("--out", mc_opts.out_dir, "Output directory");

  std::string pop_design = "1", pop_horizons, pop_out = ".";
  int pop_grid = 200000;
  std::uint64_t pop_seed = 0x9a7e11ULL;
  CLI::App* cmd_pop =
      app.add_subcommand("population-sets", "Population identified sets of a Monte Carlo design");
  cmd_pop->add_option("--design", pop_design, "Design: 1, 2, 3, 4, or four-var")->required();
  cmd_pop->add_option("--horizons", pop_horizons, "Restricted horizons for bivariate designs");
  cmd_pop->add_option("--grid-count", pop_grid, "Grid size for designs without a closed form");
  cmd_pop->add_option("--grid-seed", pop_seed, "Seed of that grid");
  cmd_pop->add_option("--out", pop_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cmd_estimate->parsed()) return run_estimate(est_opts, est_pmax);
    if (cmd_bands->parsed()) return run_bands(band_opts, false);
    if (cmd_bayes->parsed()) return run_bands(bayes_opts, true);
    if (cmd_mc->parsed()) return run_mc(mc_opts);
    if (cmd_pop->parsed())
      return run_population(pop_design, pop_horizons, pop_grid, pop_seed, pop_out);
    std::cerr << "no subcommand selected\n";
    return 1;
  } catch (const config_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const numeric_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
