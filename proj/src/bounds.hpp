#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>

#include "linear_model.hpp"
#include "mdp.hpp"

namespace tdlsys {

// The closed-form bounds all assume rewards inside [-1, 1] and a step size in
// (0, 1); the importance ratio cap that appears in some of the printed
// constants is fixed to 1 throughout (on-policy analysis).
inline constexpr double kSigmaMaxUsed = 1.0;

bool bound_regime_ok(const LinearSystemModel& model);
void require_bound_regime(const LinearSystemModel& model);

// Closed-form cap on tr(X_k) = E||V_k - v_pi||_2^2 starting from the fixed
// error x0:  36 n^2 alpha / (d_min (1-gamma)^3) + ||x0||_2^2 n^2 rho^{2k}.
double trace_bound(const LinearSystemModel& model, const Eigen::VectorXd& x0,
                   std::int64_t k);

// Same shape with the leading constant 9 instead of 36. The proof of the
// trace bound actually yields 9; the stated constant 36 is what trace_bound
// reproduces, and this variant exposes the sharper value for diagnostics.
double trace_bound_tight(const LinearSystemModel& model,
                         const Eigen::VectorXd& x0, std::int64_t k);

struct MseBound {
  double l2 = 0.0;       // cap on E||V_k - v_pi||_2 (after root subadditivity)
  double squared = 0.0;  // cap on E||V_k - v_pi||_2^2
};
MseBound mse_bound(const LinearSystemModel& model, const Eigen::VectorXd& x0,
                   std::int64_t k);

struct ChebyshevFloor {
  double threshold = 0.0;   // epsilon + rho^k sqrt(n) ||x0||_inf
  double prob_floor = 0.0;  // may be negative (vacuous); reported unclipped
};
// Guarantee P[ ||V_k - v_pi||_2 < threshold ] >= prob_floor via the
// second-moment (Chebyshev) route.
ChebyshevFloor chebyshev_floor(const LinearSystemModel& model,
                               const Eigen::VectorXd& x0, std::int64_t k,
                               double epsilon);

// First-moment (Markov) floor on P[ ||V_k - v_pi||_2 < epsilon ].
double markov_floor(const LinearSystemModel& model, const Eigen::VectorXd& x0,
                    std::int64_t k, double epsilon);

// Cap on E|| (1/k) sum_{i<k} V_i - v_pi ||_2 from the Lyapunov-function
// telescoping argument; requires k >= 1.
double averaged_bound(const LinearSystemModel& model, const Eigen::VectorXd& x0,
                      std::int64_t k);

// Markov floor for the averaged iterate at radius epsilon.
double avg_markov_floor(const LinearSystemModel& model,
                        const Eigen::VectorXd& x0, std::int64_t k,
                        double epsilon);

struct ScheduleBound {
  double alpha = 0.0;
  double bound = 0.0;
  bool clamped = false;  // T = 1 forces alpha = 1, nudged just below it
};
// Error cap at iteration T under the prescribed step size alpha = 1/sqrt(T),
// evaluated exactly as stated: T^{-1/4} ( sqrt(n / (d_min (1-gamma))) ||x0||_2
// + sqrt(36 alpha n^2 / (d_min (1-gamma)^3)) ).
ScheduleBound schedule_bound(const InducedChain& chain,
                             const Eigen::VectorXd& x0, std::int64_t t);

// Step-size ceiling d_min (1 - gamma) / 8 required by the comparison bound.
double bhandari_threshold(const LinearSystemModel& model);

// Mean squared temporal-difference residual at the fixed point:
// sum_s d(s) sum_a pi(a|s) sum_{s'} P(s'|s,a) (r + gamma v_pi(s') - v_pi(s))^2.
double sigma_sq_exact(const Problem& problem);

// Comparison bound on the averaged-iterate error, valid only below the
// step-size ceiling: sqrt(exp(-alpha (1-gamma) d_min k) / d_min) ||x0||_2
// + sqrt(2 alpha sigma^2 / ((1-gamma) d_min^2)).
double bhandari_bound(const Problem& problem, const LinearSystemModel& model,
                      const Eigen::VectorXd& x0, std::int64_t k);

// Contraction envelope for the mean: rho^k ||x0||_inf.
double mean_inf_bound(const LinearSystemModel& model, const Eigen::VectorXd& x0,
                      std::int64_t k);

// Cap on the spectral norm of the correlation matrix along the whole run:
// alpha^2 w_max / (1 - rho^2) + n ||x0||_2^2.
double x_norm_bound(const LinearSystemModel& model, const Eigen::VectorXd& x0);

struct BoundReport {
  std::int64_t k = 0;
  double epsilon = 0.0;
  std::map<std::string, double> bounds;
  bool bhandari_ok = false;
  double bhandari_alpha_threshold = 0.0;
  bool schedule_clamped = false;
  struct Constants {
    double rho = 0.0;
    double w_max = 0.0;
    double v_max = 0.0;
    double sigma_max_used = kSigmaMaxUsed;
  } constants;
};

// Evaluates every bound at one (k, epsilon). Entries needing k >= 1 are
// omitted at k = 0; the comparison bound is omitted above its step-size
// ceiling; everything present is finite.
BoundReport make_report(const Problem& problem, const LinearSystemModel& model,
                        const Eigen::VectorXd& x0, std::int64_t k,
                        double epsilon);

}  // namespace tdlsys
