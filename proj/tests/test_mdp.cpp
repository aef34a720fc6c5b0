#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "errors.hpp"
#include "mdp.hpp"
#include "random_mdp.hpp"
#include "rng.hpp"
#include "test_support.hpp"

using namespace tdlsys;
namespace tst = tdlsys::testing;

TEST_CASE("uniform two-state chain has uniform d and constant values") {
  const Problem p = tst::uniform_two_state();
  CHECK(p.chain.d(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.chain.d(1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.chain.d_min == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.chain.v_pi(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(p.chain.v_pi(1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(p.chain.r_pi(0) == doctest::Approx(1.0));
  CHECK(p.chain.r_max == 1.0);
}

TEST_CASE("one-state two-action chain collapses to a unit chain") {
  const Problem p = tst::one_state_two_actions();
  CHECK(p.chain.p_pi(0, 0) == 1.0);
  CHECK(p.chain.r_pi(0) == 1.0);
  CHECK(p.chain.d(0) == 1.0);
  CHECK(p.chain.v_pi(0) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("value function matches a truncated Neumann series") {
  GeneratorSpec spec;
  spec.n_states = 4;
  spec.n_actions = 2;
  spec.seed = 11;
  spec.gamma = 0.5;
  const Problem p = generate_random_mdp(spec);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(4);
  Eigen::VectorXd term = p.chain.r_pi;
  for (int k = 0; k < 200; ++k) {
    v += term;
    term = p.chain.gamma * (p.chain.p_pi * term);
  }
  CHECK((v - p.chain.v_pi).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("induced quantities are linear in the rewards") {
  GeneratorSpec spec;
  spec.n_states = 3;
  spec.n_actions = 2;
  spec.seed = 3;
  spec.gamma = 0.9;
  const Problem base = generate_random_mdp(spec);
  TabularMdp scaled = base.mdp;
  for (double& r : scaled.reward) r *= 0.25;
  const Problem quarter = make_problem(scaled, base.policy);
  CHECK((quarter.chain.r_pi - 0.25 * base.chain.r_pi)
            .lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((quarter.chain.v_pi - 0.25 * base.chain.v_pi)
            .lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK((quarter.chain.d - base.chain.d).lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("stationary identities hold on generated chains") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    GeneratorSpec spec;
    spec.n_states = 4;
    spec.n_actions = 3;
    spec.seed = seed;
    spec.gamma = 0.8;
    const Problem p = generate_random_mdp(spec);
    CHECK(std::abs(p.chain.d.sum() - 1.0) < 1e-10);
    CHECK((p.chain.d.transpose() * p.chain.p_pi - p.chain.d.transpose())
              .lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK(p.chain.d_min > 0.0);
    CHECK(((Eigen::MatrixXd::Identity(4, 4) - p.chain.gamma * p.chain.p_pi) *
               p.chain.v_pi -
           p.chain.r_pi)
              .lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("periodic and disconnected chains are rejected") {
  CHECK_THROWS_WITH_AS(
      induce_chain(tst::two_cycle_mdp(), tst::trivial_policy(2)),
      doctest::Contains("chain not ergodic"), Error);
  try {
    induce_chain(tst::two_cycle_mdp(), tst::trivial_policy(2));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_ergodic);
  }
  CHECK_THROWS_AS(induce_chain(tst::disconnected_mdp(), tst::trivial_policy(2)),
                  Error);
}

TEST_CASE("invalid inputs are refused up front") {
  TabularMdp bad = tst::uniform_two_state().mdp;
  bad.transition[0] = 0.6;  // row no longer sums to one
  CHECK_THROWS_AS(bad.validate(), Error);

  TabularMdp bad_gamma = tst::uniform_two_state().mdp;
  bad_gamma.gamma = 1.0;
  CHECK_THROWS_AS(bad_gamma.validate(), Error);

  Policy lopsided;
  lopsided.n_states = 2;
  lopsided.n_actions = 1;
  lopsided.probs = {0.9, 1.0};
  CHECK_THROWS_AS(lopsided.validate(2, 1), Error);
}

TEST_CASE("rewards on zero-probability transitions do not count") {
  TabularMdp mdp = tst::uniform_two_state().mdp;
  mdp.transition = {1.0, 0.0, 0.5, 0.5};
  mdp.reward = {0.5, 100.0, 0.5, 0.5};
  CHECK(mdp.max_abs_reward() == 0.5);
}

TEST_CASE("degenerate transitions sample deterministically") {
  const Problem p = tst::single_state();
  RandomStream rng(123, streams::misc);
  for (int i = 0; i < 10; ++i) {
    const Transition t = sample_transition(p.mdp, p.policy, p.chain, rng);
    CHECK(t.s == 0);
    CHECK(t.a == 0);
    CHECK(t.s2 == 0);
    CHECK(t.r == 1.0);
  }
}

TEST_CASE("sampled state frequencies follow the stationary distribution") {
  const Problem p = tst::uniform_two_state();
  RandomStream rng(7, streams::misc);
  const int samples = 1000000;
  int in_state_zero = 0;
  for (int i = 0; i < samples; ++i)
    if (sample_transition(p.mdp, p.policy, p.chain, rng).s == 0)
      ++in_state_zero;
  const double freq = static_cast<double>(in_state_zero) / samples;
  CHECK(std::abs(freq - 0.5) < 3.0 * std::sqrt(0.25 / samples));
}

TEST_CASE("sampling is reproducible for a fixed seed") {
  const Problem p = tst::noisy_two_state();
  RandomStream a(99, streams::misc);
  RandomStream b(99, streams::misc);
  for (int i = 0; i < 100; ++i) {
    const Transition ta = sample_transition(p.mdp, p.policy, p.chain, a);
    const Transition tb = sample_transition(p.mdp, p.policy, p.chain, b);
    CHECK(ta.s == tb.s);
    CHECK(ta.a == tb.a);
    CHECK(ta.s2 == tb.s2);
    CHECK(ta.r == tb.r);
  }
}
