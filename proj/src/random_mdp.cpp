#include "random_mdp.hpp"

#include <cmath>
#include <sstream>

#include "errors.hpp"
#include "rng.hpp"

namespace tdlsys {

namespace {

constexpr int kMaxAttempts = 32;

// Draws one stochastic row. Weights (-log u)^(1/c) are Exp(1) samples at
// c = 1, so the normalized row is then uniform on the simplex; larger c
// flattens the weight spread and smaller c sharpens it.
void fill_stochastic_row(double* row, int n, double concentration,
                         RandomStream& rng) {
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = rng.next_double();
    if (u <= 0.0) u = 0x1.0p-53;  // guard the log against an exact zero draw
    row[i] = std::pow(-std::log(u), 1.0 / concentration);
    sum += row[i];
  }
  for (int i = 0; i < n; ++i) row[i] /= sum;
}

}  // namespace

void GeneratorSpec::validate() const {
  require(n_states > 0 && n_actions > 0, ErrorCode::invalid_argument,
          "state and action counts must be positive");
  require(gamma >= 0.0 && gamma < 1.0, ErrorCode::invalid_argument,
          "discount factor must lie in [0, 1)");
  require(reward_scale >= 0.0 && reward_scale <= 1.0,
          ErrorCode::invalid_argument,
          "reward scale must lie in [0, 1]");
  require(concentration > 0.0, ErrorCode::invalid_argument,
          "concentration must be positive");
}

Problem generate_random_mdp(const GeneratorSpec& spec) {
  spec.validate();
  std::string last_error;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    RandomStream rng(spec.seed, streams::generator,
                     static_cast<std::uint32_t>(attempt));

    TabularMdp mdp;
    mdp.n_states = spec.n_states;
    mdp.n_actions = spec.n_actions;
    mdp.gamma = spec.gamma;
    const std::size_t cells =
        static_cast<std::size_t>(spec.n_states) * spec.n_actions *
        spec.n_states;
    mdp.transition.resize(cells);
    mdp.reward.resize(cells);
    for (int s = 0; s < spec.n_states; ++s)
      for (int a = 0; a < spec.n_actions; ++a)
        fill_stochastic_row(
            &mdp.transition[(static_cast<std::size_t>(s) * spec.n_actions + a) *
                            spec.n_states],
            spec.n_states, spec.concentration, rng);
    for (std::size_t i = 0; i < cells; ++i)
      mdp.reward[i] = spec.reward_scale * (2.0 * rng.next_double() - 1.0);

    Policy policy;
    policy.n_states = spec.n_states;
    policy.n_actions = spec.n_actions;
    policy.probs.resize(static_cast<std::size_t>(spec.n_states) *
                        spec.n_actions);
    for (int s = 0; s < spec.n_states; ++s)
      fill_stochastic_row(
          &policy.probs[static_cast<std::size_t>(s) * spec.n_actions],
          spec.n_actions, spec.concentration, rng);

    try {
      return make_problem(std::move(mdp), std::move(policy));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::not_ergodic) throw;
      last_error = e.what();
    }
  }
  std::ostringstream msg;
  msg << "no ergodic instance after " << kMaxAttempts
      << " attempts (seed " << spec.seed << ", " << spec.n_states
      << " states, " << spec.n_actions << " actions): " << last_error;
  fail(ErrorCode::not_ergodic, msg.str());
}

}  // namespace tdlsys
