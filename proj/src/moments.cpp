#include "moments.hpp"

#include <cmath>
#include <sstream>

#include "bounds.hpp"
#include "errors.hpp"

namespace tdlsys {

namespace {

constexpr double kSymTol = 1e-12;
constexpr double kPsdTol = 1e-10;

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m,
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void check_state(const MomentState& state, const char* context) {
  const int n = static_cast<int>(state.mean.size());
  require(state.corr.rows() == n && state.corr.cols() == n,
          ErrorCode::invalid_argument,
          std::string(context) + ": moment shapes disagree");
  const double scale = std::max(1.0, state.corr.cwiseAbs().maxCoeff());
  require((state.corr - state.corr.transpose()).cwiseAbs().maxCoeff() <=
              kSymTol * scale,
          ErrorCode::invalid_argument,
          std::string(context) + ": correlation matrix is not symmetric");
  require(min_eigenvalue(state.corr) >= -kPsdTol, ErrorCode::invalid_argument,
          std::string(context) +
              ": correlation matrix is not positive semidefinite");
  require(min_eigenvalue(state.corr - state.mean * state.mean.transpose()) >=
              -kPsdTol,
          ErrorCode::invalid_argument,
          std::string(context) +
              ": correlation minus outer mean must stay positive semidefinite");
}

bool is_point_mass(const MomentState& state) {
  const double scale = std::max(1.0, state.corr.cwiseAbs().maxCoeff());
  return (state.corr - state.mean * state.mean.transpose())
             .cwiseAbs()
             .maxCoeff() <= 1e-12 * scale;
}

}  // namespace

MomentState point_mass_state(const Eigen::VectorXd& x0) {
  MomentState state;
  state.k = 0;
  state.mean = x0;
  state.corr = x0 * x0.transpose();
  return state;
}

NoiseCovariance noise_covariance(const Problem& problem,
                                 const LinearSystemModel& model,
                                 const MomentState& state) {
  check_state(state, "noise covariance input");

  const TabularMdp& mdp = problem.mdp;
  const InducedChain& chain = problem.chain;
  const int n = mdp.n_states;
  const double gamma = mdp.gamma;

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  for (int s = 0; s < n; ++s) {
    double q = 0.0;
    for (int a = 0; a < mdp.n_actions; ++a) {
      const double w = problem.policy.pi(s, a);
      if (w == 0.0) continue;
      for (int s2 = 0; s2 < n; ++s2) {
        const double pr = mdp.p(s, a, s2);
        if (pr == 0.0) continue;
        const double db =
            mdp.r(s, a, s2) + gamma * chain.v_pi(s2) - chain.v_pi(s);
        const double second =
            gamma * gamma * state.corr(s2, s2) - 2.0 * gamma * state.corr(s2, s) +
            state.corr(s, s);
        const double cross = 2.0 * db * (gamma * state.mean(s2) - state.mean(s));
        q += w * pr * (db * db + cross + second);
      }
    }
    diag(s) = chain.d(s) * q;
  }

  const Eigen::MatrixXd d_diag = chain.d.asDiagonal();
  const Eigen::MatrixXd drift = gamma * d_diag * chain.p_pi - d_diag;

  NoiseCovariance out;
  out.w = Eigen::MatrixXd(diag.asDiagonal()) -
          drift * state.corr * drift.transpose();
  out.w = 0.5 * (out.w + out.w.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.w,
                                                    Eigen::EigenvaluesOnly);
  require(es.eigenvalues().minCoeff() >= -kPsdTol, ErrorCode::numeric,
          "noise covariance lost positive semidefiniteness");
  out.lambda_max = es.eigenvalues().maxCoeff();
  (void)model;
  return out;
}

std::vector<MomentState> propagate_correlation(const Problem& problem,
                                               const LinearSystemModel& model,
                                               const MomentState& init,
                                               std::int64_t horizon) {
  require(horizon >= 0, ErrorCode::invalid_argument,
          "horizon must be nonnegative");
  check_state(init, "initial moment state");
  require(init.mean.size() == model.n(), ErrorCode::invalid_argument,
          "moment state dimension does not match the model");

  // The closed-form trace bound assumes the run starts from one fixed error
  // vector and that the inputs sit inside the bounded-reward regime; only
  // then is the per-step trace check meaningful.
  const bool watch_trace = bound_regime_ok(model) && is_point_mass(init);
  const Eigen::VectorXd x0 = init.mean;

  std::vector<MomentState> out;
  out.reserve(static_cast<std::size_t>(horizon) + 1);
  out.push_back(init);
  out.front().k = 0;

  const double alpha_sq = model.alpha * model.alpha;
  for (std::int64_t k = 0; k < horizon; ++k) {
    const MomentState& cur = out.back();
    const NoiseCovariance noise = noise_covariance(problem, model, cur);

    MomentState next;
    next.k = k + 1;
    next.mean = model.a * cur.mean;
    next.corr = model.a * cur.corr * model.a.transpose() + alpha_sq * noise.w;
    next.corr = 0.5 * (next.corr + next.corr.transpose());

    const double min_eig = min_eigenvalue(next.corr);
    if (min_eig < -kPsdTol) {
      std::ostringstream msg;
      msg << "correlation lost positive semidefiniteness at step " << next.k
          << " (min eigenvalue " << min_eig << ")";
      fail(ErrorCode::numeric, msg.str());
    }
    if (min_eigenvalue(next.corr - next.mean * next.mean.transpose()) <
        -kPsdTol) {
      std::ostringstream msg;
      msg << "correlation fell below its mean outer product at step "
          << next.k;
      fail(ErrorCode::numeric, msg.str());
    }
    if (watch_trace) {
      const double bound = trace_bound(model, x0, next.k);
      if (next.corr.trace() > bound * (1.0 + 1e-9)) {
        std::ostringstream msg;
        msg << "correlation trace exceeded its closed-form bound at step "
            << next.k;
        fail(ErrorCode::numeric, msg.str());
      }
    }
    out.push_back(std::move(next));
  }
  return out;
}

double trace(const MomentState& state) { return state.corr.trace(); }

}  // namespace tdlsys
