#include "experiment.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "bounds.hpp"
#include "csv.hpp"
#include "divergence.hpp"
#include "errors.hpp"
#include "json.hpp"
#include "moments.hpp"
#include "serialize.hpp"
#include "simulate.hpp"
#include "stein.hpp"

namespace tdlsys {

namespace {

using nlohmann::json;

constexpr double kDominationSlack = 1e-10;  // relative, floating point only

std::string flag(bool violated) { return violated ? "1" : "0"; }

double coverage_below(const std::vector<double>& samples, double threshold) {
  if (samples.empty()) return 0.0;
  std::int64_t hits = 0;
  for (double v : samples)
    if (v < threshold) ++hits;
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

double coverage_se(double p, std::int64_t n) {
  if (n < 1) return 0.0;
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

GeneratorSpec generator_from_json(const json& node) {
  require(node.is_object(), ErrorCode::parse,
          "\"random\" must be an object");
  GeneratorSpec spec;
  auto num = [&](const char* key, double fallback, bool required) {
    if (!node.contains(key)) {
      require(!required, ErrorCode::parse,
              std::string("random generator needs \"") + key + "\"");
      return fallback;
    }
    require(node[key].is_number(), ErrorCode::parse,
            std::string("generator field \"") + key + "\" must be a number");
    return node[key].get<double>();
  };
  spec.n_states = static_cast<int>(num("n_states", 0, true));
  spec.n_actions = static_cast<int>(num("n_actions", 0, true));
  spec.seed = static_cast<std::uint64_t>(num("seed", 0, true));
  spec.gamma = num("gamma", 0.5, false);
  spec.reward_scale = num("reward_scale", 1.0, false);
  spec.concentration = num("concentration", 1.0, false);
  spec.validate();
  return spec;
}

std::vector<std::int64_t> default_probes(std::int64_t horizon) {
  std::vector<std::int64_t> probes;
  for (std::int64_t k = 1; k <= horizon; k *= 10) probes.push_back(k);
  if (!probes.empty() && probes.back() != horizon) probes.push_back(horizon);
  return probes;
}

struct ViolationLog {
  std::vector<std::string> entries;

  void add(std::int64_t k, double epsilon, const std::string& what) {
    std::ostringstream msg;
    msg << "k=" << k;
    if (epsilon > 0.0) msg << " epsilon=" << csv_number(epsilon);
    msg << ": " << what;
    entries.push_back(msg.str());
  }
};

json divergence_json(const OffPolicySpec& spec,
                     const DivergenceDemoResult& demo) {
  json out;
  out["epsilon"] = spec.epsilon;
  out["streak_n"] = demo.streak_n;
  out["n_runs"] = demo.n_runs;
  out["horizon"] = demo.horizon;
  out["streak_frequency"] = demo.streak_frequency;
  out["streak_probability"] = demo.streak_probability;
  out["streak_se"] = coverage_se(demo.streak_probability, demo.n_runs);
  json table = json::array();
  for (const ThresholdRow& row : threshold_table(
           {0.02, 0.05, 0.08, 0.1, 0.12, 0.2, 0.3, 0.5, 0.7, 0.9})) {
    table.push_back({{"epsilon", row.epsilon},
                     {"coefficient", row.coefficient},
                     {"diverges", row.diverges}});
  }
  out["threshold_table"] = std::move(table);
  out["on_policy_max_abs"] = on_policy_max_abs(spec, demo.horizon);
  out["on_policy_cap"] = 1.0 / (1.0 - spec.gamma);
  return out;
}

}  // namespace

void write_divergence_report(const OffPolicySpec& spec,
                             const DivergenceDemoResult& demo,
                             const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorCode::io, "cannot create output directory: " + out_dir);
  CsvBuilder csv({"run", "max_abs_v"});
  for (std::size_t i = 0; i < demo.max_abs_v.size(); ++i)
    csv.append_row({std::to_string(i), csv_number(demo.max_abs_v[i])});
  write_text_file((dir / "divergence.csv").string(), csv.text());
  write_text_file((dir / "divergence.json").string(),
                  divergence_json(spec, demo).dump(2) + "\n");
}

unsigned phase_mask_from_name(const std::string& name) {
  if (name == "exact") return kPhaseExact;
  if (name == "mc") return kPhaseMc;
  if (name == "bounds") return kPhaseExact | kPhaseBounds;
  if (name == "stein") return kPhaseStein;
  if (name == "divergence") return kPhaseDivergence;
  fail(ErrorCode::invalid_argument,
       "unknown phase \"" + name +
           "\" (expected exact, mc, bounds, stein or divergence)");
}

unsigned ExperimentConfig::default_phases() const {
  unsigned mask = kPhaseExact | kPhaseBounds | kPhaseStein;
  if (n_runs > 0) mask |= kPhaseMc;
  if (divergence.has_value()) mask |= kPhaseDivergence;
  return mask;
}

ExperimentConfig config_from_json_text(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  require(!doc.is_discarded(), ErrorCode::parse, "malformed JSON document");
  require(doc.is_object(), ErrorCode::parse,
          "configuration must be a JSON object");

  ExperimentConfig config;
  require(doc.contains("mdp") && doc["mdp"].is_object(), ErrorCode::parse,
          "configuration needs an \"mdp\" object");
  const json& mdp = doc["mdp"];
  if (mdp.contains("file")) {
    require(mdp["file"].is_string(), ErrorCode::parse,
            "\"mdp.file\" must be a string");
    config.mdp_file = mdp["file"].get<std::string>();
  }
  if (mdp.contains("random"))
    config.generator = generator_from_json(mdp["random"]);
  require(config.mdp_file.has_value() != config.generator.has_value(),
          ErrorCode::parse,
          "\"mdp\" needs exactly one of \"file\" or \"random\"");

  auto number = [&](const char* key, double fallback) {
    if (!doc.contains(key)) return fallback;
    require(doc[key].is_number(), ErrorCode::parse,
            std::string("field \"") + key + "\" must be a number");
    return doc[key].get<double>();
  };
  config.alpha = number("alpha", config.alpha);
  config.horizon = static_cast<std::int64_t>(
      number("horizon", static_cast<double>(config.horizon)));
  config.n_runs = static_cast<std::int64_t>(
      number("n_runs", static_cast<double>(config.n_runs)));
  config.seed =
      static_cast<std::uint64_t>(number("seed", static_cast<double>(config.seed)));
  require(config.horizon >= 0, ErrorCode::invalid_argument,
          "horizon must be nonnegative");
  require(config.n_runs >= 0, ErrorCode::invalid_argument,
          "ensemble size must be nonnegative");

  if (doc.contains("probe_steps")) {
    require(doc["probe_steps"].is_array(), ErrorCode::parse,
            "\"probe_steps\" must be an array");
    for (const auto& v : doc["probe_steps"]) {
      require(v.is_number_integer(), ErrorCode::parse,
              "\"probe_steps\" entries must be integers");
      config.probe_steps.push_back(v.get<std::int64_t>());
    }
  }
  if (doc.contains("epsilon_list")) {
    require(doc["epsilon_list"].is_array(), ErrorCode::parse,
            "\"epsilon_list\" must be an array");
    for (const auto& v : doc["epsilon_list"]) {
      require(v.is_number(), ErrorCode::parse,
              "\"epsilon_list\" entries must be numbers");
      config.epsilon_list.push_back(v.get<double>());
    }
  }
  if (doc.contains("v0")) {
    require(doc["v0"].is_array(), ErrorCode::parse, "\"v0\" must be an array");
    Eigen::VectorXd v0(doc["v0"].size());
    int i = 0;
    for (const auto& v : doc["v0"]) {
      require(v.is_number(), ErrorCode::parse,
              "\"v0\" entries must be numbers");
      v0(i++) = v.get<double>();
    }
    config.v0 = std::move(v0);
  }
  if (doc.contains("divergence")) {
    const json& div = doc["divergence"];
    require(div.is_object(), ErrorCode::parse,
            "\"divergence\" must be an object");
    DivergenceConfig d;
    auto dn = [&](const char* key, double fallback) {
      if (!div.contains(key)) return fallback;
      require(div[key].is_number(), ErrorCode::parse,
              std::string("divergence field \"") + key +
                  "\" must be a number");
      return div[key].get<double>();
    };
    d.epsilon = dn("epsilon", d.epsilon);
    d.n_runs = static_cast<std::int64_t>(
        dn("n_runs", static_cast<double>(d.n_runs)));
    d.horizon = static_cast<std::int64_t>(
        dn("horizon", static_cast<double>(d.horizon)));
    d.streak_n = static_cast<int>(dn("streak_n", d.streak_n));
    config.divergence = d;
  }
  if (doc.contains("out_dir")) {
    require(doc["out_dir"].is_string(), ErrorCode::parse,
            "\"out_dir\" must be a string");
    config.out_dir = doc["out_dir"].get<std::string>();
  }
  return config;
}

ExperimentConfig config_from_json_file(const std::string& path) {
  ExperimentConfig config = config_from_json_text(read_text_file(path));
  // Relative MDP paths are taken relative to the configuration file.
  if (config.mdp_file.has_value()) {
    std::filesystem::path mdp_path(*config.mdp_file);
    if (mdp_path.is_relative())
      config.mdp_file =
          (std::filesystem::path(path).parent_path() / mdp_path).string();
  }
  return config;
}

ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                 unsigned phase_mask) {
  const bool want_exact = phase_mask & kPhaseExact;
  const bool want_mc = (phase_mask & kPhaseMc) && config.n_runs > 0;
  const bool want_bounds = phase_mask & kPhaseBounds;
  const bool want_stein = phase_mask & kPhaseStein;
  const bool want_divergence = phase_mask & kPhaseDivergence;

  const Problem problem =
      config.mdp_file.has_value()
          ? problem_from_json_file(*config.mdp_file)
          : generate_random_mdp(*config.generator);
  const int n = problem.mdp.n_states;
  const LinearSystemModel model = build_system(problem.chain, config.alpha);

  Eigen::VectorXd v0 =
      config.v0.value_or(Eigen::VectorXd::Zero(n));
  require(v0.size() == n, ErrorCode::invalid_argument,
          "\"v0\" length does not match the state count");
  require(v0.lpNorm<Eigen::Infinity>() <= 1.0, ErrorCode::regime,
          "initial values must lie inside the unit ball");
  const Eigen::VectorXd x0 = v0 - problem.chain.v_pi;

  std::vector<std::int64_t> probes =
      config.probe_steps.empty() ? default_probes(config.horizon)
                                 : config.probe_steps;
  std::int64_t prev_probe = 0;
  for (std::int64_t k : probes) {
    require(k >= 1 && k <= config.horizon, ErrorCode::invalid_argument,
            "probe steps must lie in [1, horizon]");
    require(k > prev_probe, ErrorCode::invalid_argument,
            "probe steps must be strictly increasing");
    prev_probe = k;
  }
  std::vector<double> epsilons =
      config.epsilon_list.empty() ? std::vector<double>{1.0}
                                  : config.epsilon_list;
  for (double eps : epsilons)
    require(eps > 0.0, ErrorCode::invalid_argument,
            "epsilon values must be positive");

  const std::filesystem::path out_dir(config.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  require(!ec, ErrorCode::io,
          "cannot create output directory: " + out_dir.string());

  ViolationLog log;
  json summary;
  summary["schema_version"] = 1;
  summary["generated_by"] = "td-lsys";
  summary["model"] = {
      {"n_states", n},
      {"alpha", model.alpha},
      {"gamma", model.gamma},
      {"rho", model.rho},
      {"d_min", model.d_min},
      {"d_max", problem.chain.d_max},
      {"r_max", model.r_max},
      {"w_max", model.w_max},
      {"v_max", model.v_max},
      {"sigma_max_used", kSigmaMaxUsed},
      {"spectral_radius", spectral_radius(model.a)},
  };
  summary["config"] = {
      {"alpha", config.alpha},     {"horizon", config.horizon},
      {"n_runs", config.n_runs},   {"seed", config.seed},
      {"probe_steps", probes},     {"epsilon_list", epsilons},
  };
  json phases = json::array();

  // Exact moment propagation.
  std::vector<MomentState> trajectory;
  if (want_exact) {
    phases.push_back("exact");
    trajectory = propagate_correlation(problem, model, point_mass_state(x0),
                                       config.horizon);
    CsvBuilder csv({"k", "trace_x", "mean_inf_norm", "noise_lambda_max"});
    for (const MomentState& state : trajectory) {
      const NoiseCovariance noise = noise_covariance(problem, model, state);
      csv.append_row({std::to_string(state.k), csv_number(trace(state)),
                      csv_number(state.mean.lpNorm<Eigen::Infinity>()),
                      csv_number(noise.lambda_max)});
    }
    write_text_file((out_dir / "moments.csv").string(), csv.text());
  }

  // Monte Carlo ensemble.
  EnsembleStats stats;
  if (want_mc) {
    phases.push_back("mc");
    RunConfig run;
    run.alpha = config.alpha;
    run.horizon = config.horizon;
    run.n_runs = config.n_runs;
    run.seed = config.seed;
    run.v0 = v0;
    run.record_ks = probes;
    stats = run_td(problem, run);
    summary["max_sup_norm"] = stats.max_sup_norm;
    summary["sup_norm_cap"] = model.v_max;
    if (stats.max_sup_norm > model.v_max)
      log.add(config.horizon, 0.0, "sup norm exceeded 1/(1-gamma)");
  }

  // Bound evaluation and domination/coverage comparisons.
  if (want_bounds) {
    phases.push_back("bounds");
    CsvBuilder csv({
        "k",                    "epsilon",
        "exact_trace",          "exact_mean_inf",
        "exact_x_norm",         "emp_mse",
        "emp_mse_se",           "emp_l2",
        "emp_l2_se",            "emp_avg_err",
        "emp_avg_err_se",       "bound_mean_inf",
        "bound_trace",          "bound_trace_tight",
        "bound_mse_l2",         "bound_mse_sq",
        "bound_x_norm",         "chebyshev_threshold",
        "chebyshev_floor",      "chebyshev_informative",
        "chebyshev_coverage",   "markov_floor",
        "markov_informative",   "markov_coverage",
        "bound_avg_l2",         "avg_markov_floor",
        "avg_markov_informative", "avg_markov_coverage",
        "schedule_alpha",       "bound_schedule",
        "bhandari_alpha_max",   "bound_bhandari",
        "viol_mean",            "viol_trace",
        "viol_mse_l2",          "viol_x_norm",
        "viol_chebyshev",       "viol_markov",
        "viol_avg",             "viol_avg_markov",
        "viol_bhandari",
    });
    for (std::size_t pi = 0; pi < probes.size(); ++pi) {
      const std::int64_t k = probes[pi];
      const MomentState* exact =
          want_exact && k < static_cast<std::int64_t>(trajectory.size())
              ? &trajectory[static_cast<std::size_t>(k)]
              : nullptr;
      const ProbeStats* emp = want_mc ? &stats.probes[pi] : nullptr;
      for (double eps : epsilons) {
        const BoundReport report = make_report(problem, model, x0, k, eps);
        const auto bound = [&](const char* name) {
          return report.bounds.at(name);
        };
        const bool has_avg = report.bounds.count("avg_l2") > 0;
        const bool has_bhandari = report.bounds.count("bhandari_avg") > 0;

        std::string exact_trace, exact_mean_inf, exact_x_norm;
        std::string viol_mean, viol_trace, viol_mse_l2, viol_x_norm;
        if (exact != nullptr) {
          const double tr = trace(*exact);
          const double mean_inf = exact->mean.lpNorm<Eigen::Infinity>();
          const double x_spec =
              exact->corr.selfadjointView<Eigen::Lower>()
                  .eigenvalues()
                  .cwiseAbs()
                  .maxCoeff();
          exact_trace = csv_number(tr);
          exact_mean_inf = csv_number(mean_inf);
          exact_x_norm = csv_number(x_spec);
          const bool v_mean =
              mean_inf > bound("mean_inf") * (1.0 + kDominationSlack) + 1e-300;
          const bool v_trace = tr > bound("trace") * (1.0 + kDominationSlack);
          const bool v_mse =
              std::sqrt(tr) > bound("mse_l2") * (1.0 + kDominationSlack);
          const bool v_xn =
              x_spec > bound("x_norm") * (1.0 + kDominationSlack);
          viol_mean = flag(v_mean);
          viol_trace = flag(v_trace);
          viol_mse_l2 = flag(v_mse);
          viol_x_norm = flag(v_xn);
          if (v_mean) log.add(k, eps, "mean escaped its contraction envelope");
          if (v_trace) log.add(k, eps, "exact trace exceeded its bound");
          if (v_mse) log.add(k, eps, "exact rms error exceeded its bound");
          if (v_xn) log.add(k, eps, "correlation norm exceeded its bound");
        }

        std::string emp_mse, emp_mse_se, emp_l2, emp_l2_se, emp_avg,
            emp_avg_se;
        std::string cheb_cov, markov_cov, avg_markov_cov;
        std::string viol_cheb, viol_markov, viol_avg, viol_avg_markov,
            viol_bhandari;
        if (emp != nullptr) {
          emp_mse = csv_number(emp->emp_mse);
          emp_mse_se = csv_number(emp->emp_mse_se);
          emp_l2 = csv_number(emp->emp_l2);
          emp_l2_se = csv_number(emp->emp_l2_se);
          emp_avg = csv_number(emp->emp_avg_err);
          emp_avg_se = csv_number(emp->emp_avg_err_se);

          const double cheb_floor = bound("chebyshev");
          const double cheb_threshold = bound("chebyshev_threshold");
          const double cov_cheb =
              coverage_below(emp->norm_samples, cheb_threshold);
          cheb_cov = csv_number(cov_cheb);
          bool v = false;
          if (cheb_floor > 0.0) {
            const double se = coverage_se(cov_cheb, stats.n_runs);
            v = cov_cheb < cheb_floor - 3.0 * se - 1e-12;
          }
          viol_cheb = flag(v);
          if (v) log.add(k, eps, "coverage fell below its variance floor");

          const double mk_floor = bound("markov");
          const double cov_markov = coverage_below(emp->norm_samples, eps);
          markov_cov = csv_number(cov_markov);
          v = false;
          if (mk_floor > 0.0) {
            const double se = coverage_se(cov_markov, stats.n_runs);
            v = cov_markov < mk_floor - 3.0 * se - 1e-12;
          }
          viol_markov = flag(v);
          if (v) log.add(k, eps, "coverage fell below its mean floor");

          if (has_avg) {
            const bool va = emp->emp_avg_err > bound("avg_l2") + 1e-12;
            viol_avg = flag(va);
            if (va)
              log.add(k, eps, "averaged-iterate error exceeded its bound");

            const double am_floor = bound("avg_markov");
            const double cov_am =
                coverage_below(emp->avg_norm_samples, eps);
            avg_markov_cov = csv_number(cov_am);
            bool vm = false;
            if (am_floor > 0.0) {
              const double se = coverage_se(cov_am, stats.n_runs);
              vm = cov_am < am_floor - 3.0 * se - 1e-12;
            }
            viol_avg_markov = flag(vm);
            if (vm)
              log.add(k, eps,
                      "averaged coverage fell below its mean floor");
          }
          if (has_bhandari) {
            const bool vb =
                emp->emp_avg_err > bound("bhandari_avg") + 1e-12;
            viol_bhandari = flag(vb);
            if (vb)
              log.add(k, eps,
                      "averaged-iterate error exceeded the comparison bound");
          }
        }

        csv.append_row({
            std::to_string(k),
            csv_number(eps),
            exact_trace,
            exact_mean_inf,
            exact_x_norm,
            emp_mse,
            emp_mse_se,
            emp_l2,
            emp_l2_se,
            emp_avg,
            emp_avg_se,
            csv_number(bound("mean_inf")),
            csv_number(bound("trace")),
            csv_number(bound("trace_tight")),
            csv_number(bound("mse_l2")),
            csv_number(bound("mse_sq")),
            csv_number(bound("x_norm")),
            csv_number(bound("chebyshev_threshold")),
            csv_number(bound("chebyshev")),
            flag(bound("chebyshev") > 0.0),
            cheb_cov,
            csv_number(bound("markov")),
            flag(bound("markov") > 0.0),
            markov_cov,
            has_avg ? csv_number(bound("avg_l2")) : "",
            has_avg ? csv_number(bound("avg_markov")) : "",
            has_avg ? flag(bound("avg_markov") > 0.0) : "",
            avg_markov_cov,
            has_avg ? csv_number(bound("schedule_alpha")) : "",
            has_avg ? csv_number(bound("schedule")) : "",
            csv_number(report.bhandari_alpha_threshold),
            has_bhandari ? csv_number(bound("bhandari_avg")) : "",
            viol_mean,
            viol_trace,
            viol_mse_l2,
            viol_x_norm,
            viol_cheb,
            viol_markov,
            viol_avg,
            viol_avg_markov,
            viol_bhandari,
        });
      }
    }
    write_text_file((out_dir / "bounds.csv").string(), csv.text());
  }

  // Lyapunov certificate.
  if (want_stein) {
    phases.push_back("stein");
    const SteinCertificate cert = stein_solve(model);
    RandomStream rng(config.seed, streams::lyapunov);
    const DecrementReport dec =
        lyapunov_decrement_check(model, cert, 100, rng);
    json stein;
    stein["residual_inf"] = cert.residual_inf;
    stein["lambda_min"] = cert.lambda_min;
    stein["lambda_max"] = cert.lambda_max;
    stein["lambda_max_cap"] = n / (1.0 - model.rho);
    stein["series_terms"] = cert.series_terms;
    stein["route_max_diff"] = cert.route_max_diff;
    stein["decrement_trials"] = dec.trials;
    stein["decrement_max_violation"] = dec.max_violation;
    write_text_file((out_dir / "stein.json").string(), stein.dump(2) + "\n");
    summary["stein"] = stein;
  }

  // Off-policy divergence demo.
  if (want_divergence) {
    phases.push_back("divergence");
    const DivergenceConfig div = config.divergence.value_or(DivergenceConfig{});
    OffPolicySpec spec;
    spec.epsilon = div.epsilon;
    const DivergenceDemoResult demo = sampled_demo(
        spec, div.n_runs, div.horizon, div.streak_n, config.seed);
    write_divergence_report(spec, demo, out_dir.string());
    summary["divergence"] = divergence_json(spec, demo);

    const double se =
        coverage_se(demo.streak_probability, demo.n_runs);
    if (std::abs(demo.streak_frequency - demo.streak_probability) >
        3.0 * se + 1e-12)
      log.add(div.horizon, div.epsilon,
              "streak frequency strayed from its binomial law");
  }

  summary["phases"] = std::move(phases);
  summary["violations"] = log.entries;
  summary["violation_count"] = log.entries.size();
  write_text_file((out_dir / "summary.json").string(),
                  summary.dump(2) + "\n");

  ExperimentOutcome outcome;
  outcome.out_dir = out_dir.string();
  outcome.violations = std::move(log.entries);
  return outcome;
}

}  // namespace tdlsys
