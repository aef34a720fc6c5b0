#include "bounds.hpp"

#include <cmath>
#include <sstream>

#include "errors.hpp"

namespace tdlsys {

namespace {

double pow_int(double base, std::int64_t e) {
  return std::pow(base, static_cast<double>(e));
}

double trace_shape(const LinearSystemModel& model, const Eigen::VectorXd& x0,
                   std::int64_t k, double lead) {
  const double n = model.n();
  const double omg = 1.0 - model.gamma;
  const double steady = lead * kSigmaMaxUsed * kSigmaMaxUsed * n * n *
                        model.alpha / (model.d_min * omg * omg * omg);
  const double transient =
      x0.squaredNorm() * n * n * pow_int(model.rho, 2 * k);
  return steady + transient;
}

void check_x0(const LinearSystemModel& model, const Eigen::VectorXd& x0) {
  require(x0.size() == model.n(), ErrorCode::invalid_argument,
          "initial error vector has the wrong dimension");
}

}  // namespace

bool bound_regime_ok(const LinearSystemModel& model) {
  return model.alpha > 0.0 && model.alpha < 1.0 &&
         model.r_max <= 1.0 + 1e-12;
}

void require_bound_regime(const LinearSystemModel& model) {
  if (bound_regime_ok(model)) return;
  std::ostringstream msg;
  msg << "bounds need rewards within [-1, 1] and a step size in (0, 1); got "
      << "max |r| = " << model.r_max << ", alpha = " << model.alpha;
  fail(ErrorCode::regime, msg.str());
}

double trace_bound(const LinearSystemModel& model, const Eigen::VectorXd& x0,
                   std::int64_t k) {
  check_x0(model, x0);
  require_bound_regime(model);
  return trace_shape(model, x0, k, 36.0);
}

double trace_bound_tight(const LinearSystemModel& model,
                         const Eigen::VectorXd& x0, std::int64_t k) {
  check_x0(model, x0);
  require_bound_regime(model);
  return trace_shape(model, x0, k, 9.0);
}

MseBound mse_bound(const LinearSystemModel& model, const Eigen::VectorXd& x0,
                   std::int64_t k) {
  check_x0(model, x0);
  require_bound_regime(model);
  const double n = model.n();
  const double omg = 1.0 - model.gamma;
  MseBound out;
  out.l2 = 6.0 * n * std::sqrt(model.alpha) /
               (std::sqrt(model.d_min) * std::pow(omg, 1.5)) +
           x0.norm() * n * pow_int(model.rho, k);
  out.squared = trace_shape(model, x0, k, 36.0);
  return out;
}

ChebyshevFloor chebyshev_floor(const LinearSystemModel& model,
                               const Eigen::VectorXd& x0, std::int64_t k,
                               double epsilon) {
  check_x0(model, x0);
  require_bound_regime(model);
  require(epsilon > 0.0, ErrorCode::invalid_argument,
          "radius epsilon must be positive");
  const double n = model.n();
  const double omg = 1.0 - model.gamma;
  ChebyshevFloor out;
  out.threshold = epsilon + pow_int(model.rho, k) * std::sqrt(n) *
                               x0.lpNorm<Eigen::Infinity>();
  const double eps_sq = epsilon * epsilon;
  out.prob_floor = 1.0 -
                   36.0 * n * n * model.alpha /
                       (eps_sq * model.d_min * omg * omg * omg) -
                   x0.squaredNorm() * n * n * pow_int(model.rho, 2 * k) / eps_sq;
  return out;
}

double markov_floor(const LinearSystemModel& model, const Eigen::VectorXd& x0,
                    std::int64_t k, double epsilon) {
  require(epsilon > 0.0, ErrorCode::invalid_argument,
          "radius epsilon must be positive");
  return 1.0 - mse_bound(model, x0, k).l2 / epsilon;
}

double averaged_bound(const LinearSystemModel& model, const Eigen::VectorXd& x0,
                      std::int64_t k) {
  check_x0(model, x0);
  require_bound_regime(model);
  require(k >= 1, ErrorCode::invalid_argument,
          "averaged iterate needs at least one step");
  const double n = model.n();
  const double omg = 1.0 - model.gamma;
  const double transient = std::sqrt(n / (static_cast<double>(k) * model.alpha *
                                          model.d_min * omg)) *
                           x0.norm();
  const double steady =
      std::sqrt(36.0 * model.alpha * kSigmaMaxUsed * kSigmaMaxUsed * n * n /
                (model.d_min * omg * omg * omg));
  return transient + steady;
}

double avg_markov_floor(const LinearSystemModel& model,
                        const Eigen::VectorXd& x0, std::int64_t k,
                        double epsilon) {
  require(epsilon > 0.0, ErrorCode::invalid_argument,
          "radius epsilon must be positive");
  return 1.0 - averaged_bound(model, x0, k) / epsilon;
}

ScheduleBound schedule_bound(const InducedChain& chain,
                             const Eigen::VectorXd& x0, std::int64_t t) {
  require(t >= 1, ErrorCode::invalid_argument,
          "iteration count must be at least 1");
  require(x0.size() == chain.n(), ErrorCode::invalid_argument,
          "initial error vector has the wrong dimension");
  ScheduleBound out;
  out.alpha = 1.0 / std::sqrt(static_cast<double>(t));
  if (out.alpha >= 1.0) {
    // T = 1 prescribes alpha = 1, outside the admissible step sizes; nudge
    // just below the boundary instead of refusing the endpoint.
    out.alpha = 1.0 - 1e-9;
    out.clamped = true;
  }
  const double n = chain.n();
  const double omg = 1.0 - chain.gamma;
  const double inner =
      std::sqrt(n / (chain.d_min * omg)) * x0.norm() +
      std::sqrt(36.0 * out.alpha * kSigmaMaxUsed * kSigmaMaxUsed * n * n /
                (chain.d_min * omg * omg * omg));
  out.bound = std::pow(static_cast<double>(t), -0.25) * inner;
  return out;
}

double bhandari_threshold(const LinearSystemModel& model) {
  return model.d_min * (1.0 - model.gamma) / 8.0;
}

double sigma_sq_exact(const Problem& problem) {
  const TabularMdp& mdp = problem.mdp;
  const InducedChain& chain = problem.chain;
  double total = 0.0;
  for (int s = 0; s < mdp.n_states; ++s) {
    double inner = 0.0;
    for (int a = 0; a < mdp.n_actions; ++a) {
      const double w = problem.policy.pi(s, a);
      if (w == 0.0) continue;
      for (int s2 = 0; s2 < mdp.n_states; ++s2) {
        const double pr = mdp.p(s, a, s2);
        if (pr == 0.0) continue;
        const double db =
            mdp.r(s, a, s2) + mdp.gamma * chain.v_pi(s2) - chain.v_pi(s);
        inner += w * pr * db * db;
      }
    }
    total += chain.d(s) * inner;
  }
  return total;
}

double bhandari_bound(const Problem& problem, const LinearSystemModel& model,
                      const Eigen::VectorXd& x0, std::int64_t k) {
  check_x0(model, x0);
  require_bound_regime(model);
  const double ceiling = bhandari_threshold(model);
  if (model.alpha > ceiling) {
    std::ostringstream msg;
    msg << "comparison bound needs alpha <= d_min (1 - gamma) / 8 = "
        << ceiling << "; got alpha = " << model.alpha;
    fail(ErrorCode::regime, msg.str());
  }
  require(k >= 1, ErrorCode::invalid_argument,
          "averaged iterate needs at least one step");
  const double omg = 1.0 - model.gamma;
  const double decay = std::exp(-model.alpha * omg * model.d_min *
                                static_cast<double>(k));
  const double transient = std::sqrt(decay / model.d_min) * x0.norm();
  const double steady =
      std::sqrt(2.0 * model.alpha * sigma_sq_exact(problem) /
                (omg * model.d_min * model.d_min));
  return transient + steady;
}

double mean_inf_bound(const LinearSystemModel& model, const Eigen::VectorXd& x0,
                      std::int64_t k) {
  check_x0(model, x0);
  return pow_int(model.rho, k) * x0.lpNorm<Eigen::Infinity>();
}

double x_norm_bound(const LinearSystemModel& model,
                    const Eigen::VectorXd& x0) {
  check_x0(model, x0);
  require_bound_regime(model);
  const double n = model.n();
  return model.alpha * model.alpha * model.w_max /
             (1.0 - model.rho * model.rho) +
         n * x0.squaredNorm();
}

BoundReport make_report(const Problem& problem, const LinearSystemModel& model,
                        const Eigen::VectorXd& x0, std::int64_t k,
                        double epsilon) {
  require(k >= 0, ErrorCode::invalid_argument, "step index must be nonnegative");
  BoundReport report;
  report.k = k;
  report.epsilon = epsilon;
  report.constants = {model.rho, model.w_max, model.v_max, kSigmaMaxUsed};
  report.bhandari_alpha_threshold = bhandari_threshold(model);
  report.bhandari_ok = model.alpha <= report.bhandari_alpha_threshold;

  report.bounds["mean_inf"] = mean_inf_bound(model, x0, k);
  report.bounds["trace"] = trace_bound(model, x0, k);
  report.bounds["trace_tight"] = trace_bound_tight(model, x0, k);
  const MseBound mse = mse_bound(model, x0, k);
  report.bounds["mse_l2"] = mse.l2;
  report.bounds["mse_sq"] = mse.squared;
  const ChebyshevFloor cheb = chebyshev_floor(model, x0, k, epsilon);
  report.bounds["chebyshev_threshold"] = cheb.threshold;
  report.bounds["chebyshev"] = cheb.prob_floor;
  report.bounds["markov"] = markov_floor(model, x0, k, epsilon);
  report.bounds["x_norm"] = x_norm_bound(model, x0);
  if (k >= 1) {
    report.bounds["avg_l2"] = averaged_bound(model, x0, k);
    report.bounds["avg_markov"] = avg_markov_floor(model, x0, k, epsilon);
    const ScheduleBound sched = schedule_bound(problem.chain, x0, k);
    report.bounds["schedule_alpha"] = sched.alpha;
    report.bounds["schedule"] = sched.bound;
    report.schedule_clamped = sched.clamped;
    if (report.bhandari_ok)
      report.bounds["bhandari_avg"] = bhandari_bound(problem, model, x0, k);
  }
  return report;
}

}  // namespace tdlsys
