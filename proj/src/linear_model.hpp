#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mdp.hpp"

namespace tdlsys {

// TD-learning in error coordinates x = V - v_pi evolves as
// x_{k+1} = A x_k + alpha w_k with A = I + alpha (gamma D P - D), where D is
// the diagonal of the stationary distribution. This struct freezes A together
// with the constants the bound suite consumes.
struct LinearSystemModel {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;     // alpha * D * r_pi, the drift in V coordinates
  Eigen::VectorXd v_pi;  // fixed point, for mapping between V and x
  double alpha = 0.0;
  double rho = 0.0;    // 1 - alpha * d_min * (1 - gamma), equals the inf-norm of A
  double w_max = 0.0;  // 9 / (1 - gamma)^2, cap on the noise covariance scale
  double v_max = 0.0;  // 1 / (1 - gamma), cap on iterates started inside the unit ball
  double gamma = 0.0;
  double d_min = 0.0;
  double r_max = 0.0;

  int n() const { return static_cast<int>(a.rows()); }
};

// Assembles the system matrix for a chain and step size in (0, 1); verifies
// the row-sum identity ||A||_inf == rho and entrywise nonnegativity.
LinearSystemModel build_system(const InducedChain& chain, double alpha);

struct NormCertificate {
  double norm = 0.0;
  double rho = 0.0;
};

// Recomputes the inf-norm of A and checks it coincides with the closed-form
// contraction factor to 1e-12.
NormCertificate infinity_norm_certificate(const LinearSystemModel& model);

// The deterministic mean recursion m_{j+1} = A m_j, returning m_0 .. m_k.
// Each iterate is checked against the contraction envelope rho^j ||x0||_inf.
std::vector<Eigen::VectorXd> propagate_mean(const LinearSystemModel& model,
                                            const Eigen::VectorXd& x0,
                                            std::int64_t k);

// Largest eigenvalue modulus, reported for diagnostics only; the bounds all
// use the inf-norm contraction factor.
double spectral_radius(const Eigen::MatrixXd& a);

}  // namespace tdlsys
