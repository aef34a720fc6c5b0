#include "stein.hpp"

#include <cmath>

#include "errors.hpp"

namespace tdlsys {

namespace {

constexpr double kAgreeTol = 1e-8;
constexpr double kTailTol = 1e-12;

Eigen::MatrixXd series_solution(const Eigen::MatrixXd& a, double rho,
                                std::int64_t* terms_out) {
  const int n = static_cast<int>(a.rows());
  // Partial sums are built by doubling: with P = A^K and S holding the first
  // K terms, S + P' S P holds the first 2K and P^2 is A^{2K}.  Reaching a
  // truncation index K takes log2(K) fused updates instead of K separate
  // additions, which matters for rho close to 1 where K runs into the
  // millions and term-by-term rounding would swamp the comparison with the
  // direct solve.
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd power = a;
  const double rho_sq = rho * rho;
  // Tail after K terms is bounded by n rho^{2K} / (1 - rho^2); stop once that
  // certified remainder is negligible.  tail_factor tracks rho^{2K} for the
  // current K and squares along with the doubling.
  double tail_factor = rho_sq;
  const double tail_scale = static_cast<double>(n) / (1.0 - rho_sq);
  std::int64_t terms = 1;
  while (tail_scale * tail_factor >= kTailTol) {
    sum += power.transpose() * sum * power;
    power = power * power;
    tail_factor *= tail_factor;
    if (terms < (std::int64_t{1} << 62)) terms *= 2;
  }
  *terms_out = terms;
  return sum;
}

Eigen::MatrixXd direct_solution(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const Eigen::MatrixXd at = a.transpose();
  // vec(A' M A) = (A' kron A') vec(M) with the column-major vec convention.
  Eigen::MatrixXd kron(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      kron.block(i * n, j * n, n, n) = at(i, j) * at;
  const Eigen::MatrixXd sys =
      Eigen::MatrixXd::Identity(n * n, n * n) - kron;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n * n);
  for (int i = 0; i < n; ++i) rhs(i * n + i) = 1.0;
  const Eigen::VectorXd solution = sys.partialPivLu().solve(rhs);
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = solution(j * n + i);
  return m;
}

}  // namespace

SteinCertificate stein_solve_matrix(const Eigen::MatrixXd& a, double rho) {
  require(a.rows() == a.cols() && a.rows() > 0, ErrorCode::invalid_argument,
          "system matrix must be square");
  require(rho >= 0.0 && rho < 1.0, ErrorCode::invalid_argument,
          "series needs a contraction factor below 1");
  const int n = static_cast<int>(a.rows());

  SteinCertificate cert;
  Eigen::MatrixXd m_series = series_solution(a, rho, &cert.series_terms);
  const Eigen::MatrixXd m_direct = direct_solution(a);
  cert.route_max_diff = (m_series - m_direct).cwiseAbs().maxCoeff();
  require(cert.route_max_diff <= kAgreeTol, ErrorCode::numeric,
          "series and direct Lyapunov solutions disagree");

  cert.m = 0.5 * (m_series + m_series.transpose());
  const Eigen::MatrixXd residual =
      a.transpose() * cert.m * a - cert.m +
      Eigen::MatrixXd::Identity(n, n);
  cert.residual_inf = residual.cwiseAbs().rowwise().sum().maxCoeff();
  require(cert.residual_inf <= kAgreeTol, ErrorCode::numeric,
          "Lyapunov equation residual too large");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cert.m,
                                                    Eigen::EigenvaluesOnly);
  cert.lambda_min = es.eigenvalues().minCoeff();
  cert.lambda_max = es.eigenvalues().maxCoeff();
  require(cert.lambda_min >= 1.0 - 1e-9, ErrorCode::numeric,
          "Lyapunov matrix lost its identity lower bound");
  require(cert.lambda_max <= n / (1.0 - rho * rho) + 1e-9, ErrorCode::numeric,
          "Lyapunov matrix exceeds its series cap");
  require(cert.lambda_max <= n / (1.0 - rho) + 1e-9, ErrorCode::numeric,
          "Lyapunov matrix exceeds its simplified cap");
  return cert;
}

SteinCertificate stein_solve(const LinearSystemModel& model) {
  require(model.rho < 1.0, ErrorCode::invalid_argument,
          "series needs a contraction factor below 1");
  return stein_solve_matrix(model.a, model.rho);
}

DecrementReport lyapunov_decrement_check(const LinearSystemModel& model,
                                         const SteinCertificate& cert,
                                         std::int64_t trials,
                                         RandomStream& rng) {
  require(trials >= 1, ErrorCode::invalid_argument,
          "decrement check needs at least one trial");
  const int n = model.n();
  DecrementReport report;
  report.trials = trials;
  for (std::int64_t t = 0; t < trials; ++t) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = 2.0 * rng.next_double() - 1.0;
    const double norm = x.norm();
    if (norm == 0.0) continue;
    x /= norm;
    const Eigen::VectorXd ax = model.a * x;
    const double lhs = ax.dot(cert.m * ax);
    const double rhs = x.dot(cert.m * x) - x.squaredNorm();
    report.max_violation = std::max(report.max_violation, std::abs(lhs - rhs));
  }
  require(report.max_violation <= 1e-8, ErrorCode::numeric,
          "Lyapunov decrement identity violated");
  return report;
}

}  // namespace tdlsys
