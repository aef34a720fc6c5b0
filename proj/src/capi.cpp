// C shim over the core library: opaque handles, status codes, and a
// thread-local error message. Every entry point traps exceptions; nothing
// C++ crosses the boundary.

#include "tdlsys.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "divergence.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "linear_model.hpp"
#include "mdp.hpp"
#include "moments.hpp"
#include "random_mdp.hpp"
#include "serialize.hpp"
#include "simulate.hpp"
#include "stein.hpp"

struct tdlsys_problem {
  tdlsys::Problem value;
};

// Bound and moment evaluation need the raw transition tensor, so the model
// handle keeps its own copy of the problem it was built from.
struct tdlsys_model {
  tdlsys::LinearSystemModel value;
  tdlsys::Problem problem;
};

namespace {

constexpr const char* kVersion = "1.0.0";

thread_local std::string g_last_error = "no error";

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return TDLSYS_OK;
  } catch (const tdlsys::Error& e) {
    g_last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TDLSYS_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return TDLSYS_ERR_INTERNAL;
  }
}

void require_arg(bool ok, const char* what) {
  tdlsys::require(ok, tdlsys::ErrorCode::invalid_argument, what);
}

char* copy_string(const std::string& text) {
  char* out = new char[text.size() + 1];
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

Eigen::VectorXd copy_vector(const double* data, int n) {
  return Eigen::Map<const Eigen::VectorXd>(data, n);
}

double bound_or_nan(const tdlsys::BoundReport& report, const char* key) {
  const auto it = report.bounds.find(key);
  return it == report.bounds.end()
             ? std::numeric_limits<double>::quiet_NaN()
             : it->second;
}

tdlsys::GeneratorSpec generator_spec(int n_states, int n_actions,
                                     uint64_t seed, double gamma,
                                     double reward_scale,
                                     double concentration) {
  tdlsys::GeneratorSpec spec;
  spec.n_states = n_states;
  spec.n_actions = n_actions;
  spec.seed = seed;
  spec.gamma = gamma;
  spec.reward_scale = reward_scale;
  spec.concentration = concentration;
  return spec;
}

}  // namespace

extern "C" {

const char* tdlsys_version(void) { return kVersion; }

const char* tdlsys_last_error(void) { return g_last_error.c_str(); }

void tdlsys_string_free(char* text) { delete[] text; }

int tdlsys_problem_from_json_text(const char* text, tdlsys_problem** out) {
  return guarded([&] {
    require_arg(text != nullptr, "text must not be null");
    require_arg(out != nullptr, "out must not be null");
    *out = new tdlsys_problem{tdlsys::problem_from_json_text(text)};
  });
}

int tdlsys_problem_from_json_file(const char* path, tdlsys_problem** out) {
  return guarded([&] {
    require_arg(path != nullptr, "path must not be null");
    require_arg(out != nullptr, "out must not be null");
    *out = new tdlsys_problem{tdlsys::problem_from_json_file(path)};
  });
}

int tdlsys_problem_random(int n_states, int n_actions, uint64_t seed,
                          double gamma, double reward_scale,
                          double concentration, tdlsys_problem** out) {
  return guarded([&] {
    require_arg(out != nullptr, "out must not be null");
    *out = new tdlsys_problem{tdlsys::generate_random_mdp(generator_spec(
        n_states, n_actions, seed, gamma, reward_scale, concentration))};
  });
}

void tdlsys_problem_free(tdlsys_problem* problem) { delete problem; }

int tdlsys_problem_n_states(const tdlsys_problem* problem) {
  if (problem == nullptr) {
    g_last_error = "problem must not be null";
    return 0;
  }
  return problem->value.chain.n();
}

int tdlsys_problem_stationary(const tdlsys_problem* problem, double* out) {
  return guarded([&] {
    require_arg(problem != nullptr, "problem must not be null");
    require_arg(out != nullptr, "out must not be null");
    const Eigen::VectorXd& d = problem->value.chain.d;
    std::copy(d.data(), d.data() + d.size(), out);
  });
}

int tdlsys_problem_value_function(const tdlsys_problem* problem, double* out) {
  return guarded([&] {
    require_arg(problem != nullptr, "problem must not be null");
    require_arg(out != nullptr, "out must not be null");
    const Eigen::VectorXd& v = problem->value.chain.v_pi;
    std::copy(v.data(), v.data() + v.size(), out);
  });
}

int tdlsys_problem_to_json_text(const tdlsys_problem* problem, char** out) {
  return guarded([&] {
    require_arg(problem != nullptr, "problem must not be null");
    require_arg(out != nullptr, "out must not be null");
    *out = copy_string(
        tdlsys::problem_to_json_text(problem->value.mdp, problem->value.policy));
  });
}

int tdlsys_model_build(const tdlsys_problem* problem, double alpha,
                       tdlsys_model** out) {
  return guarded([&] {
    require_arg(problem != nullptr, "problem must not be null");
    require_arg(out != nullptr, "out must not be null");
    *out = new tdlsys_model{
        tdlsys::build_system(problem->value.chain, alpha), problem->value};
  });
}

void tdlsys_model_free(tdlsys_model* model) { delete model; }

int tdlsys_model_get_info(const tdlsys_model* model, tdlsys_model_info* out) {
  return guarded([&] {
    require_arg(model != nullptr, "model must not be null");
    require_arg(out != nullptr, "out must not be null");
    const tdlsys::LinearSystemModel& m = model->value;
    out->n_states = m.n();
    out->alpha = m.alpha;
    out->gamma = m.gamma;
    out->rho = m.rho;
    out->d_min = m.d_min;
    out->w_max = m.w_max;
    out->v_max = m.v_max;
    out->spectral_radius = tdlsys::spectral_radius(m.a);
  });
}

int tdlsys_model_system_matrix(const tdlsys_model* model, double* out) {
  return guarded([&] {
    require_arg(model != nullptr, "model must not be null");
    require_arg(out != nullptr, "out must not be null");
    const Eigen::MatrixXd& a = model->value.a;
    const int n = static_cast<int>(a.rows());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[i * n + j] = a(i, j);
  });
}

int tdlsys_model_to_json_text(const tdlsys_model* model, char** out) {
  return guarded([&] {
    require_arg(model != nullptr, "model must not be null");
    require_arg(out != nullptr, "out must not be null");
    *out = copy_string(tdlsys::model_to_json_text(model->value));
  });
}

int tdlsys_bounds_eval(const tdlsys_model* model, const double* x0, int64_t k,
                       double epsilon, tdlsys_bound_values* out) {
  return guarded([&] {
    require_arg(model != nullptr, "model must not be null");
    require_arg(x0 != nullptr, "x0 must not be null");
    require_arg(out != nullptr, "out must not be null");
    const tdlsys::BoundReport report =
        tdlsys::make_report(model->problem, model->value,
                            copy_vector(x0, model->value.n()), k, epsilon);
    out->mean_inf = bound_or_nan(report, "mean_inf");
    out->trace = bound_or_nan(report, "trace");
    out->trace_tight = bound_or_nan(report, "trace_tight");
    out->mse_l2 = bound_or_nan(report, "mse_l2");
    out->mse_sq = bound_or_nan(report, "mse_sq");
    out->chebyshev_threshold = bound_or_nan(report, "chebyshev_threshold");
    out->chebyshev_floor = bound_or_nan(report, "chebyshev");
    out->markov_floor = bound_or_nan(report, "markov");
    out->x_norm = bound_or_nan(report, "x_norm");
    out->avg_l2 = bound_or_nan(report, "avg_l2");
    out->avg_markov_floor = bound_or_nan(report, "avg_markov");
    out->schedule_alpha = bound_or_nan(report, "schedule_alpha");
    out->schedule = bound_or_nan(report, "schedule");
    out->bhandari_avg = bound_or_nan(report, "bhandari_avg");
    out->bhandari_alpha_max = report.bhandari_alpha_threshold;
    out->bhandari_valid = report.bhandari_ok ? 1 : 0;
    out->schedule_clamped = report.schedule_clamped ? 1 : 0;
    out->rho = report.constants.rho;
    out->w_max = report.constants.w_max;
    out->v_max = report.constants.v_max;
    out->sigma_max_used = report.constants.sigma_max_used;
  });
}

int tdlsys_moments_eval(const tdlsys_model* model, const double* x0,
                        int64_t horizon, double* trace_out,
                        double* mean_inf_out, double* noise_lambda_out) {
  return guarded([&] {
    require_arg(model != nullptr, "model must not be null");
    require_arg(x0 != nullptr, "x0 must not be null");
    require_arg(horizon >= 0, "horizon must be nonnegative");
    const std::vector<tdlsys::MomentState> states =
        tdlsys::propagate_correlation(
            model->problem, model->value,
            tdlsys::point_mass_state(copy_vector(x0, model->value.n())),
            horizon);
    for (std::size_t j = 0; j < states.size(); ++j) {
      if (trace_out != nullptr) trace_out[j] = tdlsys::trace(states[j]);
      if (mean_inf_out != nullptr)
        mean_inf_out[j] = states[j].mean.lpNorm<Eigen::Infinity>();
      if (noise_lambda_out != nullptr)
        noise_lambda_out[j] =
            tdlsys::noise_covariance(model->problem, model->value, states[j])
                .lambda_max;
    }
  });
}

int tdlsys_stein_solve(const tdlsys_model* model, tdlsys_stein_summary* out) {
  return guarded([&] {
    require_arg(model != nullptr, "model must not be null");
    require_arg(out != nullptr, "out must not be null");
    const tdlsys::SteinCertificate cert = tdlsys::stein_solve(model->value);
    out->residual_inf = cert.residual_inf;
    out->lambda_min = cert.lambda_min;
    out->lambda_max = cert.lambda_max;
    out->series_terms = cert.series_terms;
    out->route_max_diff = cert.route_max_diff;
  });
}

int tdlsys_simulate(const tdlsys_problem* problem, double alpha,
                    int64_t horizon, int64_t n_runs, uint64_t seed,
                    const double* v0, const int64_t* probes, size_t n_probes,
                    tdlsys_sim_probe* out, double* max_sup_norm_out) {
  return guarded([&] {
    require_arg(problem != nullptr, "problem must not be null");
    require_arg(v0 != nullptr, "v0 must not be null");
    require_arg(probes != nullptr || n_probes == 0,
                "probes must not be null");
    require_arg(out != nullptr || n_probes == 0, "out must not be null");
    tdlsys::RunConfig config;
    config.alpha = alpha;
    config.horizon = horizon;
    config.n_runs = n_runs;
    config.seed = seed;
    config.v0 = copy_vector(v0, problem->value.chain.n());
    config.record_ks.assign(probes, probes + n_probes);
    config.keep_samples = false;
    const tdlsys::EnsembleStats stats = tdlsys::run_td(problem->value, config);
    for (std::size_t i = 0; i < stats.probes.size(); ++i) {
      const tdlsys::ProbeStats& probe = stats.probes[i];
      out[i].k = probe.k;
      out[i].emp_mse = probe.emp_mse;
      out[i].emp_mse_se = probe.emp_mse_se;
      out[i].emp_l2 = probe.emp_l2;
      out[i].emp_l2_se = probe.emp_l2_se;
      out[i].emp_avg_err = probe.emp_avg_err;
      out[i].emp_avg_err_se = probe.emp_avg_err_se;
    }
    if (max_sup_norm_out != nullptr) *max_sup_norm_out = stats.max_sup_norm;
  });
}

int tdlsys_experiment_run(const char* config_path, const char* out_dir_override,
                          const char* only_phase, int has_seed, uint64_t seed,
                          int* violations_out) {
  return guarded([&] {
    require_arg(config_path != nullptr, "config_path must not be null");
    tdlsys::ExperimentConfig config =
        tdlsys::config_from_json_file(config_path);
    if (out_dir_override != nullptr) config.out_dir = out_dir_override;
    if (has_seed != 0) config.seed = seed;
    const unsigned mask = only_phase != nullptr
                              ? tdlsys::phase_mask_from_name(only_phase)
                              : config.default_phases();
    const tdlsys::ExperimentOutcome outcome =
        tdlsys::run_experiment(config, mask);
    if (violations_out != nullptr) *violations_out = outcome.violation_count();
  });
}

int tdlsys_generate_mdp_json(int n_states, int n_actions, uint64_t seed,
                             double gamma, double reward_scale,
                             double concentration, char** json_out) {
  return guarded([&] {
    require_arg(json_out != nullptr, "json_out must not be null");
    const tdlsys::Problem problem = tdlsys::generate_random_mdp(generator_spec(
        n_states, n_actions, seed, gamma, reward_scale, concentration));
    *json_out =
        copy_string(tdlsys::problem_to_json_text(problem.mdp, problem.policy));
  });
}

int tdlsys_divergence_demo(double epsilon, int64_t n_runs, int64_t horizon,
                           int streak_n, uint64_t seed, const char* out_dir,
                           tdlsys_divergence_summary* summary_out) {
  return guarded([&] {
    tdlsys::OffPolicySpec spec;
    spec.epsilon = epsilon;
    const tdlsys::DivergenceDemoResult demo =
        tdlsys::sampled_demo(spec, n_runs, horizon, streak_n, seed);
    if (out_dir != nullptr)
      tdlsys::write_divergence_report(spec, demo, out_dir);
    if (summary_out != nullptr) {
      const tdlsys::ThresholdRow row = tdlsys::threshold_table({epsilon})[0];
      summary_out->epsilon = epsilon;
      summary_out->coefficient = row.coefficient;
      summary_out->diverges = row.diverges ? 1 : 0;
      summary_out->streak_frequency = demo.streak_frequency;
      summary_out->streak_probability = demo.streak_probability;
      summary_out->max_abs_v =
          demo.max_abs_v.empty()
              ? 0.0
              : *std::max_element(demo.max_abs_v.begin(),
                                  demo.max_abs_v.end());
      summary_out->on_policy_max_abs =
          tdlsys::on_policy_max_abs(spec, horizon);
    }
  });
}

}  // extern "C"
