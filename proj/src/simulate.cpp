#include "simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "errors.hpp"

namespace tdlsys {

namespace {

// Per-probe accumulators over runs; one pass, sequential in run order so the
// reduction is deterministic.
struct Accumulator {
  Eigen::VectorXd sum_x;
  Eigen::VectorXd sum_x_sq;
  Eigen::MatrixXd sum_outer;
  Eigen::MatrixXd sum_outer_sq;
  double sum_msq = 0.0;
  double sum_msq_sq = 0.0;
  double sum_l2 = 0.0;
  double sum_l2_sq = 0.0;
  double sum_avg = 0.0;
  double sum_avg_sq = 0.0;
  std::vector<double> norm_samples;
  std::vector<double> avg_norm_samples;

  explicit Accumulator(int n)
      : sum_x(Eigen::VectorXd::Zero(n)),
        sum_x_sq(Eigen::VectorXd::Zero(n)),
        sum_outer(Eigen::MatrixXd::Zero(n, n)),
        sum_outer_sq(Eigen::MatrixXd::Zero(n, n)) {}
};

double se_from_sums(double sum, double sum_sq, std::int64_t n) {
  if (n < 2) return 0.0;
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1));
  return std::sqrt(var / n);
}

}  // namespace

void RunConfig::validate(int n_states) const {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::regime,
          "step size must lie strictly inside (0, 1)");
  require(horizon >= 0, ErrorCode::invalid_argument,
          "horizon must be nonnegative");
  require(n_runs >= 0, ErrorCode::invalid_argument,
          "ensemble size must be nonnegative");
  require(v0.size() == n_states, ErrorCode::invalid_argument,
          "initial value vector has the wrong dimension");
  require(v0.lpNorm<Eigen::Infinity>() <= 1.0, ErrorCode::regime,
          "initial values must lie inside the unit ball");
  std::int64_t prev = 0;
  for (std::int64_t k : record_ks) {
    require(k >= 1 && k <= horizon, ErrorCode::invalid_argument,
            "probe steps must lie in [1, horizon]");
    require(k > prev, ErrorCode::invalid_argument,
            "probe steps must be strictly increasing");
    prev = k;
  }
}

double averaged_error(const Eigen::VectorXd& v_sum, std::int64_t k,
                      const Eigen::VectorXd& v_pi) {
  require(k >= 1, ErrorCode::invalid_argument,
          "averaged iterate needs at least one step");
  return (v_sum / static_cast<double>(k) - v_pi).norm();
}

EnsembleStats run_td(const Problem& problem, const RunConfig& config) {
  const int n = problem.mdp.n_states;
  config.validate(n);

  const double gamma = problem.mdp.gamma;
  const double alpha = config.alpha;
  const Eigen::VectorXd& v_pi = problem.chain.v_pi;
  // Deterministic cap on every trajectory: one update is a convex combination
  // of V(s) and r + gamma V(s'), so sup-norm can never leave this ball.
  const double cap =
      std::max(problem.chain.r_max, config.v0.lpNorm<Eigen::Infinity>()) /
      (1.0 - gamma);

  std::vector<Accumulator> acc;
  acc.reserve(config.record_ks.size());
  for (std::size_t i = 0; i < config.record_ks.size(); ++i)
    acc.emplace_back(n);
  if (config.keep_samples) {
    for (auto& a : acc) {
      a.norm_samples.reserve(static_cast<std::size_t>(config.n_runs));
      a.avg_norm_samples.reserve(static_cast<std::size_t>(config.n_runs));
    }
  }

  double max_sup_norm =
      config.n_runs > 0 ? config.v0.lpNorm<Eigen::Infinity>() : 0.0;

  Eigen::VectorXd v(n), v_sum(n), x(n);
  for (std::int64_t run = 0; run < config.n_runs; ++run) {
    RandomStream rng(config.seed, streams::simulator,
                     static_cast<std::uint32_t>(run));
    v = config.v0;
    v_sum.setZero();
    std::size_t probe = 0;
    for (std::int64_t k = 0;; ++k) {
      if (probe < config.record_ks.size() && k == config.record_ks[probe]) {
        Accumulator& a = acc[probe];
        x = v - v_pi;
        a.sum_x += x;
        a.sum_x_sq += x.cwiseProduct(x);
        const Eigen::MatrixXd outer = x * x.transpose();
        a.sum_outer += outer;
        a.sum_outer_sq += outer.cwiseProduct(outer);
        const double msq = x.squaredNorm();
        a.sum_msq += msq;
        a.sum_msq_sq += msq * msq;
        const double l2 = std::sqrt(msq);
        a.sum_l2 += l2;
        a.sum_l2_sq += msq;
        const double avg_err = averaged_error(v_sum, k, v_pi);
        a.sum_avg += avg_err;
        a.sum_avg_sq += avg_err * avg_err;
        if (config.keep_samples) {
          a.norm_samples.push_back(l2);
          a.avg_norm_samples.push_back(avg_err);
        }
        ++probe;
      }
      if (k == config.horizon) break;
      v_sum += v;
      const Transition t =
          sample_transition(problem.mdp, problem.policy, problem.chain, rng);
      v(t.s) += alpha * (t.r + gamma * v(t.s2) - v(t.s));
      const double moved = std::abs(v(t.s));
      if (moved > cap) {
        std::ostringstream msg;
        msg << "iterate escaped its deterministic sup-norm cap at run " << run
            << ", step " << k << " (|V| = " << moved << ", cap = " << cap
            << ")";
        fail(ErrorCode::numeric, msg.str());
      }
      max_sup_norm = std::max(max_sup_norm, moved);
    }
  }

  EnsembleStats stats;
  stats.n_runs = config.n_runs;
  stats.max_sup_norm = max_sup_norm;
  const std::int64_t runs = config.n_runs;
  for (std::size_t i = 0; i < config.record_ks.size(); ++i) {
    Accumulator& a = acc[i];
    ProbeStats p;
    p.k = config.record_ks[i];
    if (runs > 0) {
      p.emp_mean = a.sum_x / static_cast<double>(runs);
      p.emp_mean_se = Eigen::VectorXd(n);
      for (int j = 0; j < n; ++j)
        p.emp_mean_se(j) = se_from_sums(a.sum_x(j), a.sum_x_sq(j), runs);
      p.emp_corr = a.sum_outer / static_cast<double>(runs);
      p.emp_corr_se = Eigen::MatrixXd(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
          p.emp_corr_se(r, c) =
              se_from_sums(a.sum_outer(r, c), a.sum_outer_sq(r, c), runs);
      p.emp_mse = a.sum_msq / static_cast<double>(runs);
      p.emp_mse_se = se_from_sums(a.sum_msq, a.sum_msq_sq, runs);
      p.emp_l2 = a.sum_l2 / static_cast<double>(runs);
      p.emp_l2_se = se_from_sums(a.sum_l2, a.sum_l2_sq, runs);
      p.emp_avg_err = a.sum_avg / static_cast<double>(runs);
      p.emp_avg_err_se = se_from_sums(a.sum_avg, a.sum_avg_sq, runs);
    } else {
      p.emp_mean = Eigen::VectorXd::Zero(n);
      p.emp_mean_se = Eigen::VectorXd::Zero(n);
      p.emp_corr = Eigen::MatrixXd::Zero(n, n);
      p.emp_corr_se = Eigen::MatrixXd::Zero(n, n);
    }
    p.norm_samples = std::move(a.norm_samples);
    p.avg_norm_samples = std::move(a.avg_norm_samples);
    stats.probes.push_back(std::move(p));
  }
  return stats;
}

}  // namespace tdlsys
