#pragma once

#include <cstdint>
#include <vector>

namespace tdlsys {

// The one-state, two-action MDP where importance-sampled off-policy
// TD-learning blows up: both actions pay reward 1, the target policy always
// picks action 1, the behavior policy picks it with probability 1 - epsilon,
// and gamma = alpha = 0.9. The update importance-weights the whole
// bootstrapped target, so under action 1 the value recursion is
// v <- (0.1 + 0.81 / (1 - epsilon)) v + 0.9 / (1 - epsilon) and under
// action 2 it is v <- 0.1 v.
struct OffPolicySpec {
  double epsilon = 0.5;
  double gamma = 0.9;
  double alpha = 0.9;

  double ratio_action1() const { return 1.0 / (1.0 - epsilon); }
  void validate() const;
};

double closed_form_step(const OffPolicySpec& spec, double v, int action);

struct ForcedSequence {
  std::vector<double> values;  // v_0 = 0 through v_n under action 1 only
  double prob = 0.0;           // (1 - epsilon)^n
};

// Deterministic replay of n consecutive action-1 updates from v = 0, with the
// probability of that action streak under the behavior policy. The sequence
// grows without bound exactly when the action-1 coefficient exceeds 1, i.e.
// when epsilon > 0.1.
ForcedSequence forced_sequence(const OffPolicySpec& spec, int n_steps);

struct DivergenceDemoResult {
  std::vector<double> max_abs_v;  // per run, over the whole horizon
  double streak_frequency = 0.0;  // runs whose first streak_n actions were 1
  double streak_probability = 0.0;
  int streak_n = 0;
  std::int64_t n_runs = 0;
  std::int64_t horizon = 0;
  // Full (action, value) records for the first record_runs runs, for replay
  // verification against closed_form_step.
  std::vector<std::vector<int>> recorded_actions;
  std::vector<std::vector<double>> recorded_values;
};

DivergenceDemoResult sampled_demo(const OffPolicySpec& spec,
                                  std::int64_t n_runs, std::int64_t horizon,
                                  int streak_n, std::uint64_t seed,
                                  int record_runs = 0);

struct ThresholdRow {
  double epsilon = 0.0;
  double coefficient = 0.0;
  bool diverges = false;
};

// Action-1 coefficient across an epsilon grid, with the resulting
// stability verdict per point.
std::vector<ThresholdRow> threshold_table(const std::vector<double>& eps_grid);

// The same MDP run on-policy (ratio 1) contracts; returns the largest |v|
// reached over the horizon starting from 0, which stays below
// 1 / (1 - gamma) = 10.
double on_policy_max_abs(const OffPolicySpec& spec, std::int64_t horizon);

}  // namespace tdlsys
