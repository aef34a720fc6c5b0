#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "rng.hpp"

namespace tdlsys {

// Finite MDP with dense transition and reward tensors, laid out row-major as
// index(s, a, s2) = (s * n_actions + a) * n_states + s2.
struct TabularMdp {
  int n_states = 0;
  int n_actions = 0;
  double gamma = 0.0;
  std::vector<double> transition;
  std::vector<double> reward;

  double p(int s, int a, int s2) const {
    return transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states +
                      s2];
  }
  double r(int s, int a, int s2) const {
    return reward[(static_cast<std::size_t>(s) * n_actions + a) * n_states +
                  s2];
  }

  // Largest |reward| over transitions with positive probability; rewards
  // attached to impossible transitions cannot influence anything.
  double max_abs_reward() const;

  void validate() const;
};

struct Policy {
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> probs;

  double pi(int s, int a) const {
    return probs[static_cast<std::size_t>(s) * n_actions + a];
  }

  void validate(int expected_states, int expected_actions) const;
};

// The Markov chain a policy induces on the state space, with its stationary
// distribution and the exact value function of the policy.
struct InducedChain {
  Eigen::MatrixXd p_pi;
  Eigen::VectorXd r_pi;
  Eigen::VectorXd d;
  double d_min = 0.0;
  double d_max = 0.0;
  Eigen::VectorXd v_pi;
  double gamma = 0.0;
  double r_max = 0.0;

  int n() const { return static_cast<int>(p_pi.rows()); }
};

// Everything downstream consumers need in one immutable value: the raw
// tensors (the noise covariance depends on per-transition rewards, not just
// their policy averages) plus the induced chain.
struct Problem {
  TabularMdp mdp;
  Policy policy;
  InducedChain chain;
};

// Builds the induced chain: averages the kernel and rewards under the policy,
// solves for the unique stationary distribution, and solves the Bellman
// system for the value function. Rejects chains that are not ergodic
// (reducible or periodic) or whose stationary distribution is not strictly
// positive.
InducedChain induce_chain(const TabularMdp& mdp, const Policy& policy);

Problem make_problem(TabularMdp mdp, Policy policy);

struct Transition {
  int s = 0;
  int a = 0;
  int s2 = 0;
  double r = 0.0;
};

// One observation of the i.i.d. model: state from the stationary
// distribution, action from the policy, successor from the kernel. Consumes
// exactly three stream draws per call.
Transition sample_transition(const TabularMdp& mdp, const Policy& policy,
                             const InducedChain& chain, RandomStream& rng);

}  // namespace tdlsys
