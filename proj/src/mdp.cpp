#include "mdp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include "errors.hpp"

namespace tdlsys {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kChainTol = 1e-10;

void check_row_stochastic(const double* row, int n, const char* what) {
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    require(row[i] >= 0.0, ErrorCode::invalid_argument,
            std::string(what) + " has a negative entry");
    sum += row[i];
  }
  require(std::abs(sum - 1.0) <= kRowSumTol, ErrorCode::invalid_argument,
          std::string(what) + " does not sum to 1");
}

// Strong connectivity of the directed graph with an edge i -> j whenever
// p(i, j) > 0, via forward and backward reachability from state 0.
bool strongly_connected(const Eigen::MatrixXd& p) {
  const int n = static_cast<int>(p.rows());
  auto reachable = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v = 0; v < n; ++v) {
        const double w = forward ? p(u, v) : p(v, u);
        if (w > 0.0 && !seen[v]) {
          seen[v] = 1;
          q.push(v);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  return reachable(true) && reachable(false);
}

// Period of a strongly connected chain: gcd over edges (u, v) of
// level(u) + 1 - level(v) for BFS levels from state 0. Aperiodic iff 1.
int chain_period(const Eigen::MatrixXd& p) {
  const int n = static_cast<int>(p.rows());
  std::vector<int> level(n, -1);
  std::queue<int> q;
  q.push(0);
  level[0] = 0;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v = 0; v < n; ++v) {
      if (p(u, v) > 0.0 && level[v] < 0) {
        level[v] = level[u] + 1;
        q.push(v);
      }
    }
  }
  int g = 0;
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (p(u, v) > 0.0) g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
    }
  }
  return g == 0 ? 1 : g;
}

// (I + P)^n having all-positive entries certifies that every state reaches
// every other within n steps when self-loops are adjoined; kept as a cheap
// cross-check of the graph scan above.
bool positivity_certificate(const Eigen::MatrixXd& p) {
  const int n = static_cast<int>(p.rows());
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) + p;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i) acc = acc * m;
  return (acc.array() > 0.0).all();
}

}  // namespace

double TabularMdp::max_abs_reward() const {
  double m = 0.0;
  for (int s = 0; s < n_states; ++s)
    for (int a = 0; a < n_actions; ++a)
      for (int s2 = 0; s2 < n_states; ++s2)
        if (p(s, a, s2) > 0.0) m = std::max(m, std::abs(r(s, a, s2)));
  return m;
}

void TabularMdp::validate() const {
  require(n_states > 0, ErrorCode::invalid_argument,
          "MDP needs at least one state");
  require(n_actions > 0, ErrorCode::invalid_argument,
          "MDP needs at least one action");
  require(gamma >= 0.0 && gamma < 1.0, ErrorCode::invalid_argument,
          "discount factor must lie in [0, 1)");
  const std::size_t want =
      static_cast<std::size_t>(n_states) * n_actions * n_states;
  require(transition.size() == want, ErrorCode::invalid_argument,
          "transition tensor has the wrong number of entries");
  require(reward.size() == want, ErrorCode::invalid_argument,
          "reward tensor has the wrong number of entries");
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      std::ostringstream what;
      what << "transition row (s=" << s << ", a=" << a << ")";
      check_row_stochastic(
          &transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states],
          n_states, what.str().c_str());
    }
  }
  for (double x : reward)
    require(std::isfinite(x), ErrorCode::invalid_argument,
            "reward tensor has a non-finite entry");
}

void Policy::validate(int expected_states, int expected_actions) const {
  require(n_states == expected_states && n_actions == expected_actions,
          ErrorCode::invalid_argument, "policy shape does not match the MDP");
  require(probs.size() ==
              static_cast<std::size_t>(n_states) * n_actions,
          ErrorCode::invalid_argument,
          "policy matrix has the wrong number of entries");
  for (int s = 0; s < n_states; ++s) {
    std::ostringstream what;
    what << "policy row (s=" << s << ")";
    check_row_stochastic(&probs[static_cast<std::size_t>(s) * n_actions],
                         n_actions, what.str().c_str());
  }
}

InducedChain induce_chain(const TabularMdp& mdp, const Policy& policy) {
  mdp.validate();
  policy.validate(mdp.n_states, mdp.n_actions);

  const int n = mdp.n_states;
  InducedChain chain;
  chain.gamma = mdp.gamma;
  chain.r_max = mdp.max_abs_reward();
  chain.p_pi = Eigen::MatrixXd::Zero(n, n);
  chain.r_pi = Eigen::VectorXd::Zero(n);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      const double w = policy.pi(s, a);
      if (w == 0.0) continue;
      for (int s2 = 0; s2 < n; ++s2) {
        const double pr = mdp.p(s, a, s2);
        chain.p_pi(s, s2) += w * pr;
        chain.r_pi(s) += w * pr * mdp.r(s, a, s2);
      }
    }
  }

  require(strongly_connected(chain.p_pi) && chain_period(chain.p_pi) == 1 &&
              positivity_certificate(chain.p_pi),
          ErrorCode::not_ergodic, "chain not ergodic");

  // Stationary distribution: d' (P - I) = 0 with sum(d) = 1, solved by
  // replacing the last balance equation with the normalization row.
  Eigen::MatrixXd sys = chain.p_pi.transpose() - Eigen::MatrixXd::Identity(n, n);
  sys.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
  require(lu.isInvertible(), ErrorCode::not_ergodic, "chain not ergodic");
  chain.d = lu.solve(rhs);

  chain.d_min = chain.d.minCoeff();
  chain.d_max = chain.d.maxCoeff();
  require(chain.d_min > 0.0, ErrorCode::not_ergodic,
          "stationary distribution is not strictly positive");
  require(std::abs(chain.d.sum() - 1.0) <= kChainTol, ErrorCode::numeric,
          "stationary distribution does not normalize");
  require((chain.d.transpose() * chain.p_pi - chain.d.transpose())
                  .cwiseAbs()
                  .maxCoeff() <= kChainTol,
          ErrorCode::numeric, "stationary balance residual too large");

  // Value function from the Bellman system (I - gamma P) v = r. The matrix is
  // strictly diagonally dominant for gamma < 1, so the solve is safe.
  const Eigen::MatrixXd bellman =
      Eigen::MatrixXd::Identity(n, n) - mdp.gamma * chain.p_pi;
  chain.v_pi = bellman.partialPivLu().solve(chain.r_pi);
  require((bellman * chain.v_pi - chain.r_pi).cwiseAbs().maxCoeff() <=
              kChainTol,
          ErrorCode::numeric, "value-function residual too large");

  return chain;
}

Problem make_problem(TabularMdp mdp, Policy policy) {
  InducedChain chain = induce_chain(mdp, policy);
  return Problem{std::move(mdp), std::move(policy), std::move(chain)};
}

Transition sample_transition(const TabularMdp& mdp, const Policy& policy,
                             const InducedChain& chain, RandomStream& rng) {
  Transition t;
  t.s = sample_categorical(chain.d.data(), mdp.n_states, rng.next_double());
  t.a = sample_categorical(
      &policy.probs[static_cast<std::size_t>(t.s) * mdp.n_actions],
      mdp.n_actions, rng.next_double());
  t.s2 = sample_categorical(
      &mdp.transition[(static_cast<std::size_t>(t.s) * mdp.n_actions + t.a) *
                      mdp.n_states],
      mdp.n_states, rng.next_double());
  t.r = mdp.r(t.s, t.a, t.s2);
  return t;
}

}  // namespace tdlsys
