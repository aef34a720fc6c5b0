#include "linear_model.hpp"

#include <cmath>
#include <sstream>

#include "errors.hpp"

namespace tdlsys {

LinearSystemModel build_system(const InducedChain& chain, double alpha) {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::regime,
          "step size must lie strictly inside (0, 1)");

  const int n = chain.n();
  LinearSystemModel model;
  model.alpha = alpha;
  model.gamma = chain.gamma;
  model.d_min = chain.d_min;
  model.r_max = chain.r_max;
  model.v_pi = chain.v_pi;

  const Eigen::MatrixXd d_diag = chain.d.asDiagonal();
  model.a = Eigen::MatrixXd::Identity(n, n) +
            alpha * (chain.gamma * d_diag * chain.p_pi - d_diag);
  model.b = alpha * chain.d.cwiseProduct(chain.r_pi);

  model.rho = 1.0 - alpha * chain.d_min * (1.0 - chain.gamma);
  const double one_minus_gamma = 1.0 - chain.gamma;
  model.w_max = 9.0 / (one_minus_gamma * one_minus_gamma);
  model.v_max = 1.0 / one_minus_gamma;

  require((model.a.array() >= 0.0).all(), ErrorCode::numeric,
          "system matrix has a negative entry");
  infinity_norm_certificate(model);
  return model;
}

NormCertificate infinity_norm_certificate(const LinearSystemModel& model) {
  NormCertificate cert;
  cert.norm = model.a.cwiseAbs().rowwise().sum().maxCoeff();
  cert.rho = model.rho;
  // Row i of A sums to 1 - alpha d_i (1 - gamma), so the largest row sum is
  // attained at the smallest stationary weight and equals rho exactly.
  require(cert.norm <= cert.rho + 1e-12, ErrorCode::numeric,
          "system matrix norm exceeds its contraction factor");
  require(std::abs(cert.norm - cert.rho) <= 1e-12, ErrorCode::numeric,
          "system matrix norm does not match the contraction factor");
  return cert;
}

std::vector<Eigen::VectorXd> propagate_mean(const LinearSystemModel& model,
                                            const Eigen::VectorXd& x0,
                                            std::int64_t k) {
  require(k >= 0, ErrorCode::invalid_argument,
          "horizon must be nonnegative");
  require(x0.size() == model.n(), ErrorCode::invalid_argument,
          "initial error vector has the wrong dimension");

  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(k) + 1);
  out.push_back(x0);
  const double x0_inf = x0.lpNorm<Eigen::Infinity>();
  double envelope = x0_inf;
  for (std::int64_t j = 1; j <= k; ++j) {
    out.push_back(model.a * out.back());
    envelope *= model.rho;
    // Contraction in the inf-norm is exact in real arithmetic; the slack
    // covers only dot-product rounding.
    const double norm = out.back().lpNorm<Eigen::Infinity>();
    if (norm > envelope * (1.0 + 1e-10) + 1e-300) {
      std::ostringstream msg;
      msg << "mean iterate escaped its contraction envelope at step " << j;
      fail(ErrorCode::numeric, msg.str());
    }
  }
  return out;
}

double spectral_radius(const Eigen::MatrixXd& a) {
  return a.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace tdlsys
