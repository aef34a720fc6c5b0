#pragma once

// Small hand-built instances shared across the unit tests.

#include <Eigen/Dense>
#include <initializer_list>
#include <vector>

#include "mdp.hpp"

namespace tdlsys::testing {

inline Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out(i++) = x;
  return out;
}

inline Policy trivial_policy(int n_states) {
  Policy policy;
  policy.n_states = n_states;
  policy.n_actions = 1;
  policy.probs.assign(static_cast<std::size_t>(n_states), 1.0);
  return policy;
}

// Two states, one action, uniform transitions, constant reward. Doubly
// stochastic, so d = [1/2, 1/2]; the TD residual vanishes everywhere, making
// this the canonical zero-noise instance.
inline Problem uniform_two_state(double reward = 1.0, double gamma = 0.5) {
  TabularMdp mdp;
  mdp.n_states = 2;
  mdp.n_actions = 1;
  mdp.gamma = gamma;
  mdp.transition = {0.5, 0.5, 0.5, 0.5};
  mdp.reward = {reward, reward, reward, reward};
  return make_problem(mdp, trivial_policy(2));
}

// Same chain but with state-0 rewards split to 2 and 0: r_pi and v_pi are
// unchanged while the residual becomes +/-1 from state 0, so the noise
// covariance is diag(1/2, 0). Out of the bounded-reward regime on purpose.
inline Problem split_reward_two_state() {
  TabularMdp mdp;
  mdp.n_states = 2;
  mdp.n_actions = 1;
  mdp.gamma = 0.5;
  mdp.transition = {0.5, 0.5, 0.5, 0.5};
  mdp.reward = {2.0, 0.0, 1.0, 1.0};
  return make_problem(mdp, trivial_policy(2));
}

// Regime-friendly noisy variant: state-0 rewards split to 1 and 0.
inline Problem noisy_two_state() {
  TabularMdp mdp;
  mdp.n_states = 2;
  mdp.n_actions = 1;
  mdp.gamma = 0.5;
  mdp.transition = {0.5, 0.5, 0.5, 0.5};
  mdp.reward = {1.0, 0.0, 0.25, -0.5};
  return make_problem(mdp, trivial_policy(2));
}

inline Problem single_state(double reward = 1.0, double gamma = 0.5) {
  TabularMdp mdp;
  mdp.n_states = 1;
  mdp.n_actions = 1;
  mdp.gamma = gamma;
  mdp.transition = {1.0};
  mdp.reward = {reward};
  return make_problem(mdp, trivial_policy(1));
}

// One state, two actions, unit rewards, target policy all on action 1.
inline Problem one_state_two_actions(double gamma = 0.9) {
  TabularMdp mdp;
  mdp.n_states = 1;
  mdp.n_actions = 2;
  mdp.gamma = gamma;
  mdp.transition = {1.0, 1.0};
  mdp.reward = {1.0, 1.0};
  Policy policy;
  policy.n_states = 1;
  policy.n_actions = 2;
  policy.probs = {1.0, 0.0};
  return make_problem(mdp, policy);
}

inline TabularMdp two_cycle_mdp() {
  TabularMdp mdp;
  mdp.n_states = 2;
  mdp.n_actions = 1;
  mdp.gamma = 0.5;
  mdp.transition = {0.0, 1.0, 1.0, 0.0};
  mdp.reward = {0.0, 0.0, 0.0, 0.0};
  return mdp;
}

inline TabularMdp disconnected_mdp() {
  TabularMdp mdp;
  mdp.n_states = 2;
  mdp.n_actions = 1;
  mdp.gamma = 0.5;
  mdp.transition = {1.0, 0.0, 0.0, 1.0};
  mdp.reward = {0.0, 0.0, 0.0, 0.0};
  return mdp;
}

}  // namespace tdlsys::testing
