/* Public C interface of the td-lsys library.
 *
 * The library models tabular TD-learning policy evaluation as a discrete-time
 * stochastic linear system: it builds the exact system matrix for an ergodic
 * MDP/policy pair, propagates error moments in closed form, evaluates a suite
 * of finite-time bounds, certifies the associated discrete Lyapunov equation,
 * and cross-checks everything against a seeded Monte Carlo simulator.
 *
 * All functions return TDLSYS_OK (0) on success or a nonzero status code;
 * tdlsys_last_error() describes the most recent failure on the calling
 * thread. Objects are opaque and must be released with their free function.
 */
#ifndef TDLSYS_H
#define TDLSYS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum tdlsys_status {
  TDLSYS_OK = 0,
  TDLSYS_ERR_INVALID_ARGUMENT = 1,
  TDLSYS_ERR_PARSE = 2,
  TDLSYS_ERR_NOT_ERGODIC = 3,
  TDLSYS_ERR_REGIME = 4, /* inputs outside what the bounds assume */
  TDLSYS_ERR_NUMERIC = 5,
  TDLSYS_ERR_IO = 6,
  TDLSYS_ERR_INTERNAL = 7
};

/* An MDP with its target policy and the induced chain (stationary
 * distribution, value function). */
typedef struct tdlsys_problem tdlsys_problem;

/* The linear error system built from a problem at one step size. */
typedef struct tdlsys_model tdlsys_model;

const char* tdlsys_version(void);

/* Thread-local message for the last failed call; never NULL. */
const char* tdlsys_last_error(void);

/* Frees strings returned through char** out-parameters. */
void tdlsys_string_free(char* text);

/* ---- Problems ---------------------------------------------------------- */

/* JSON schema: {"n_states", "n_actions", "gamma", "transition" (nested
 * s -> a -> s'), "reward" (same shape), "policy" (s -> a)}. */
int tdlsys_problem_from_json_text(const char* text, tdlsys_problem** out);
int tdlsys_problem_from_json_file(const char* path, tdlsys_problem** out);

/* Seeded random ergodic instance; gamma in [0, 1), reward_scale in [0, 1],
 * concentration > 0. */
int tdlsys_problem_random(int n_states, int n_actions, uint64_t seed,
                          double gamma, double reward_scale,
                          double concentration, tdlsys_problem** out);

void tdlsys_problem_free(tdlsys_problem* problem);

int tdlsys_problem_n_states(const tdlsys_problem* problem);

/* Buffers must hold n_states doubles. */
int tdlsys_problem_stationary(const tdlsys_problem* problem, double* out);
int tdlsys_problem_value_function(const tdlsys_problem* problem, double* out);

int tdlsys_problem_to_json_text(const tdlsys_problem* problem, char** out);

/* ---- Models ------------------------------------------------------------ */

int tdlsys_model_build(const tdlsys_problem* problem, double alpha,
                       tdlsys_model** out);
void tdlsys_model_free(tdlsys_model* model);

typedef struct tdlsys_model_info {
  int n_states;
  double alpha;
  double gamma;
  double rho;       /* contraction factor; equals the inf-norm of A */
  double d_min;
  double w_max;
  double v_max;
  double spectral_radius;
} tdlsys_model_info;

int tdlsys_model_get_info(const tdlsys_model* model, tdlsys_model_info* out);

/* Row-major n x n system matrix. */
int tdlsys_model_system_matrix(const tdlsys_model* model, double* out);

int tdlsys_model_to_json_text(const tdlsys_model* model, char** out);

/* ---- Bounds ------------------------------------------------------------ */

typedef struct tdlsys_bound_values {
  double mean_inf;            /* contraction envelope for the mean */
  double trace;               /* cap on E||V_k - v_pi||_2^2 */
  double trace_tight;         /* same shape with the sharper constant 9 */
  double mse_l2;              /* cap on E||V_k - v_pi||_2 */
  double mse_sq;
  double chebyshev_threshold;
  double chebyshev_floor;     /* may be negative (vacuous) */
  double markov_floor;
  double x_norm;              /* cap on the correlation spectral norm */
  double avg_l2;              /* k >= 1 only, else NaN */
  double avg_markov_floor;    /* k >= 1 only, else NaN */
  double schedule_alpha;      /* k >= 1 only, else NaN */
  double schedule;            /* k >= 1 only, else NaN */
  double bhandari_avg;        /* NaN unless alpha <= bhandari_alpha_max */
  double bhandari_alpha_max;
  int bhandari_valid;
  int schedule_clamped;
  double rho;
  double w_max;
  double v_max;
  double sigma_max_used;
} tdlsys_bound_values;

/* x0 is the initial error V_0 - v_pi (n_states doubles); epsilon > 0. */
int tdlsys_bounds_eval(const tdlsys_model* model, const double* x0,
                       int64_t k, double epsilon, tdlsys_bound_values* out);

/* ---- Exact moments ----------------------------------------------------- */

/* Per step j = 0..horizon (inclusive; buffers hold horizon + 1 doubles):
 * trace of the correlation (the exact mean squared error), inf-norm of the
 * mean, and the top noise-covariance eigenvalue. Any output may be NULL. */
int tdlsys_moments_eval(const tdlsys_model* model, const double* x0,
                        int64_t horizon, double* trace_out,
                        double* mean_inf_out, double* noise_lambda_out);

/* ---- Lyapunov certificate ---------------------------------------------- */

typedef struct tdlsys_stein_summary {
  double residual_inf;   /* || A' M A - M + I ||_inf */
  double lambda_min;     /* >= 1 */
  double lambda_max;     /* <= n / (1 - rho) */
  int64_t series_terms;
  double route_max_diff; /* truncated series vs direct dense solve */
} tdlsys_stein_summary;

int tdlsys_stein_solve(const tdlsys_model* model, tdlsys_stein_summary* out);

/* ---- Simulation -------------------------------------------------------- */

typedef struct tdlsys_sim_probe {
  int64_t k;
  double emp_mse;
  double emp_mse_se;
  double emp_l2;
  double emp_l2_se;
  double emp_avg_err;
  double emp_avg_err_se;
} tdlsys_sim_probe;

/* v0 holds n_states doubles with ||v0||_inf <= 1; probes holds n_probes
 * strictly increasing steps in [1, horizon]; out holds n_probes entries.
 * max_sup_norm_out may be NULL. */
int tdlsys_simulate(const tdlsys_problem* problem, double alpha,
                    int64_t horizon, int64_t n_runs, uint64_t seed,
                    const double* v0, const int64_t* probes, size_t n_probes,
                    tdlsys_sim_probe* out, double* max_sup_norm_out);

/* ---- Experiments ------------------------------------------------------- */

/* Runs the configured experiment and writes its report files. only_phase
 * selects one of "exact", "mc", "bounds", "stein", "divergence" or NULL for
 * the configured default; out_dir_override and seed (with has_seed nonzero)
 * replace the configured values. Returns the number of contract violations
 * through violations_out (may be NULL). */
int tdlsys_experiment_run(const char* config_path, const char* out_dir_override,
                          const char* only_phase, int has_seed, uint64_t seed,
                          int* violations_out);

/* Random instance serialized to the problem JSON schema. */
int tdlsys_generate_mdp_json(int n_states, int n_actions, uint64_t seed,
                             double gamma, double reward_scale,
                             double concentration, char** json_out);

/* ---- Off-policy divergence demo ---------------------------------------- */

typedef struct tdlsys_divergence_summary {
  double epsilon;
  double coefficient;        /* action-1 recursion coefficient */
  int diverges;              /* coefficient > 1, i.e. epsilon > 0.1 */
  double streak_frequency;   /* observed first-N action-1 streaks */
  double streak_probability; /* (1 - epsilon)^N */
  double max_abs_v;          /* largest |V| across all runs */
  double on_policy_max_abs;  /* same MDP run on-policy; stays below 10 */
} tdlsys_divergence_summary;

/* Writes divergence.csv and divergence.json into out_dir when out_dir is
 * non-NULL; summary_out may be NULL. */
int tdlsys_divergence_demo(double epsilon, int64_t n_runs, int64_t horizon,
                           int streak_n, uint64_t seed, const char* out_dir,
                           tdlsys_divergence_summary* summary_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TDLSYS_H */
