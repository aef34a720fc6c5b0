#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "linear_model.hpp"
#include "mdp.hpp"

namespace tdlsys {

// First and second moments of the error x_k = V_k - v_pi across the run
// distribution: mean m_k = E[x_k] and correlation X_k = E[x_k x_k'].
struct MomentState {
  std::int64_t k = 0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd corr;
};

struct NoiseCovariance {
  Eigen::MatrixXd w;
  double lambda_max = 0.0;
};

MomentState point_mass_state(const Eigen::VectorXd& x0);

// Covariance of the per-step noise w_k given the current moments. The update
// noise is w = e_s (db + gamma x(s') - x(s)) - B x with B = gamma D P - D and
// db the deterministic temporal-difference residual r + gamma v_pi(s') -
// v_pi(s); conditioning on x makes the first term's second moment diagonal
// and leaves no cross term, so
//   W = Diag_s( d(s) q_s ) - B X B',
//   q_s = sum_{a,s'} pi(a|s) P(s'|s,a) [ db^2 + 2 db (gamma m(s') - m(s))
//         + gamma^2 X(s',s') - 2 gamma X(s',s) + X(s,s) ].
// The result is symmetric positive semidefinite for every valid moment state.
NoiseCovariance noise_covariance(const Problem& problem,
                                 const LinearSystemModel& model,
                                 const MomentState& state);

// Exact propagation m_{k+1} = A m_k, X_{k+1} = A X_k A' + alpha^2 W_k,
// returning states 0..horizon. Every produced state is validated (symmetry,
// positive semidefiniteness, covariance consistency); when the inputs sit in
// the bounded-reward regime and the initial state is a point mass, the trace
// is additionally checked against its closed-form bound each step.
std::vector<MomentState> propagate_correlation(const Problem& problem,
                                               const LinearSystemModel& model,
                                               const MomentState& init,
                                               std::int64_t horizon);

// tr(X_k), which equals the exact mean squared error E||V_k - v_pi||_2^2.
double trace(const MomentState& state);

}  // namespace tdlsys
