#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "linear_model.hpp"
#include "rng.hpp"

namespace tdlsys {

// Solution of the discrete Lyapunov (Stein) equation A' M A = M - I, which is
// the series M = sum_{k>=0} (A^k)' A^k when the inf-norm of A stays below 1.
struct SteinCertificate {
  Eigen::MatrixXd m;
  double residual_inf = 0.0;   // || A' M A - M + I ||_inf
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  std::int64_t series_terms = 0;
  double route_max_diff = 0.0;  // series vs direct vectorized solve
};

// Computes M along two independent routes and refuses to certify unless they
// agree entrywise to 1e-8:
//  - the truncated series with K chosen so the tail n rho^{2K} / (1 - rho^2)
//    falls below 1e-12, accumulated by partial-sum doubling,
//  - the dense solve of (I - A' kron A') vec(M) = vec(I).
// Also asserts lambda_min >= 1, lambda_max <= n / (1 - rho^2) <= n / (1 - rho),
// and the equation residual below 1e-8.
SteinCertificate stein_solve_matrix(const Eigen::MatrixXd& a, double rho);
SteinCertificate stein_solve(const LinearSystemModel& model);

struct DecrementReport {
  std::int64_t trials = 0;
  double max_violation = 0.0;
};

// Spot-checks the quadratic form v(x) = x' M x on random unit vectors:
// the Stein identity gives v(A x) = v(x) - x' x exactly, which is the
// one-step decrement the averaged-iterate analysis telescopes.
DecrementReport lyapunov_decrement_check(const LinearSystemModel& model,
                                         const SteinCertificate& cert,
                                         std::int64_t trials,
                                         RandomStream& rng);

}  // namespace tdlsys
