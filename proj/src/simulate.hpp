#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mdp.hpp"

namespace tdlsys {

struct RunConfig {
  double alpha = 0.1;
  std::int64_t horizon = 0;
  std::int64_t n_runs = 0;
  std::uint64_t seed = 0;
  Eigen::VectorXd v0;
  std::vector<std::int64_t> record_ks;  // strictly increasing, in [1, horizon]
  bool keep_samples = true;             // retain per-run norms at each probe

  void validate(int n_states) const;
};

// Ensemble summaries at one probe step, all in error coordinates
// x = V - v_pi. Standard errors come from the ensemble sample variance.
struct ProbeStats {
  std::int64_t k = 0;
  Eigen::VectorXd emp_mean;
  Eigen::VectorXd emp_mean_se;
  Eigen::MatrixXd emp_corr;     // mean of x x'
  Eigen::MatrixXd emp_corr_se;  // entrywise standard errors
  double emp_mse = 0.0;         // mean of ||x||_2^2
  double emp_mse_se = 0.0;
  double emp_l2 = 0.0;          // mean of ||x||_2
  double emp_l2_se = 0.0;
  double emp_avg_err = 0.0;     // mean of ||(1/k) sum_{i<k} V_i - v_pi||_2
  double emp_avg_err_se = 0.0;
  std::vector<double> norm_samples;      // per-run ||x_k||_2
  std::vector<double> avg_norm_samples;  // per-run averaged-iterate error
};

struct EnsembleStats {
  std::vector<ProbeStats> probes;
  double max_sup_norm = 0.0;  // max over runs and steps of ||V||_inf
  std::int64_t n_runs = 0;
};

// Runs n_runs independent trajectories of the single-coordinate update
// V(s) += alpha (r + gamma V(s') - V(s)) under the i.i.d. observation model,
// recording ensemble statistics at each probe step. Run r draws from stream
// (seed, simulator, r) with three draws per step, so results are
// bit-identical for a given (seed, config) regardless of how runs are
// scheduled. Every trajectory is checked against the deterministic cap
// max(max |r|, ||v0||_inf) / (1 - gamma); a violation aborts, since it can
// only mean a broken update rule.
EnsembleStats run_td(const Problem& problem, const RunConfig& config);

// Error of the running average (1/k) sum_{i<k} V_i against v_pi, for one
// run's accumulated iterate sum.
double averaged_error(const Eigen::VectorXd& v_sum, std::int64_t k,
                      const Eigen::VectorXd& v_pi);

}  // namespace tdlsys
