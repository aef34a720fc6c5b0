#include "divergence.hpp"

#include <cmath>

#include "errors.hpp"
#include "rng.hpp"

namespace tdlsys {

void OffPolicySpec::validate() const {
  require(epsilon > 0.0 && epsilon < 1.0, ErrorCode::invalid_argument,
          "exploration epsilon must lie strictly inside (0, 1)");
  // The ratio is target over behavior probability of action 1; with
  // pi(1) = 1 and b(1) = 1 - epsilon that is exactly 1 / (1 - epsilon).
  const double expected = 1.0 / (1.0 - epsilon);
  require(std::abs(ratio_action1() - expected) <= 1e-14 * expected,
          ErrorCode::internal, "importance ratio is inconsistent");
}

double closed_form_step(const OffPolicySpec& spec, double v, int action) {
  spec.validate();
  require(action == 1 || action == 2, ErrorCode::invalid_argument,
          "action must be 1 or 2");
  if (action == 1) {
    const double c =
        (1.0 - spec.alpha) + spec.alpha * spec.gamma * spec.ratio_action1();
    return c * v + spec.alpha * spec.ratio_action1();
  }
  // Action 2 has ratio 0: the whole weighted target drops out.
  return (1.0 - spec.alpha) * v;
}

ForcedSequence forced_sequence(const OffPolicySpec& spec, int n_steps) {
  spec.validate();
  require(n_steps >= 1, ErrorCode::invalid_argument,
          "forced sequence needs at least one step");
  ForcedSequence out;
  out.values.reserve(static_cast<std::size_t>(n_steps) + 1);
  out.values.push_back(0.0);
  for (int i = 0; i < n_steps; ++i)
    out.values.push_back(closed_form_step(spec, out.values.back(), 1));
  out.prob = std::pow(1.0 - spec.epsilon, n_steps);
  return out;
}

DivergenceDemoResult sampled_demo(const OffPolicySpec& spec,
                                  std::int64_t n_runs, std::int64_t horizon,
                                  int streak_n, std::uint64_t seed,
                                  int record_runs) {
  spec.validate();
  require(n_runs >= 1 && horizon >= 1, ErrorCode::invalid_argument,
          "demo needs at least one run and one step");
  require(streak_n >= 1 && streak_n <= horizon, ErrorCode::invalid_argument,
          "streak length must lie in [1, horizon]");

  DivergenceDemoResult result;
  result.streak_n = streak_n;
  result.n_runs = n_runs;
  result.horizon = horizon;
  result.max_abs_v.reserve(static_cast<std::size_t>(n_runs));

  std::int64_t streak_hits = 0;
  for (std::int64_t run = 0; run < n_runs; ++run) {
    RandomStream rng(seed, streams::divergence,
                     static_cast<std::uint32_t>(run));
    const bool record = run < record_runs;
    if (record) {
      result.recorded_actions.emplace_back();
      result.recorded_values.push_back({0.0});
    }
    double v = 0.0;
    double max_abs = 0.0;
    bool streak = true;
    for (std::int64_t k = 0; k < horizon; ++k) {
      const int action = rng.next_double() < 1.0 - spec.epsilon ? 1 : 2;
      v = closed_form_step(spec, v, action);
      max_abs = std::max(max_abs, std::abs(v));
      if (k < streak_n && action != 1) streak = false;
      if (record) {
        result.recorded_actions.back().push_back(action);
        result.recorded_values.back().push_back(v);
      }
    }
    result.max_abs_v.push_back(max_abs);
    if (streak) ++streak_hits;
  }
  result.streak_frequency =
      static_cast<double>(streak_hits) / static_cast<double>(n_runs);
  result.streak_probability = std::pow(1.0 - spec.epsilon, streak_n);
  return result;
}

std::vector<ThresholdRow> threshold_table(const std::vector<double>& eps_grid) {
  std::vector<ThresholdRow> rows;
  rows.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    OffPolicySpec spec;
    spec.epsilon = eps;
    spec.validate();
    ThresholdRow row;
    row.epsilon = eps;
    row.coefficient =
        (1.0 - spec.alpha) + spec.alpha * spec.gamma * spec.ratio_action1();
    row.diverges = row.coefficient > 1.0;
    rows.push_back(row);
  }
  return rows;
}

double on_policy_max_abs(const OffPolicySpec& spec, std::int64_t horizon) {
  spec.validate();
  // With ratio 1 the recursion is v <- (1 - alpha) v + alpha (1 + gamma v),
  // a contraction toward 1 / (1 - gamma).
  double v = 0.0;
  double max_abs = 0.0;
  for (std::int64_t k = 0; k < horizon; ++k) {
    v = (1.0 - spec.alpha) * v + spec.alpha * (1.0 + spec.gamma * v);
    max_abs = std::max(max_abs, std::abs(v));
  }
  return max_abs;
}

}  // namespace tdlsys
