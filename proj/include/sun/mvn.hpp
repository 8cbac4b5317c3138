#pragma once

#include "sun/config.hpp"
#include "sun/linalg.hpp"

namespace sun::mvn {

struct CdfResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
};

/// Density of N_h(0, sigma) at x.
double logpdf(const Vector& x, const Matrix& sigma);
double pdf(const Vector& x, const Matrix& sigma);

/// P(X <= u component-wise) for X ~ N_m(0, sigma), m <= 16.
///
/// Dimensions 1-3 use closed forms / deterministic quadrature (absolute
/// error around 1e-15 / 1e-13). Higher dimensions use a separation-of-
/// variables reformulation integrated with a randomly shifted sqrt-prime
/// lattice rule; the error_estimate is three standard errors across shifts.
/// The result is a deterministic function of (u, sigma, cfg.seed,
/// cfg.max_points) regardless of cfg.threads. When the estimate does not
/// reach cfg.abs_tol within cfg.max_points, the best estimate is returned
/// with converged=false.
CdfResult cdf(const Vector& u, const Matrix& sigma, const IntegrationConfig& cfg = {});

/// Gradient of u -> Phi_m(u; gamma) for a correlation matrix gamma;
/// component j is phi(u_j) * Phi_{m-1} of the conditional remainder.
Vector cdf_gradient(const Vector& tau, const Matrix& gamma, const IntegrationConfig& cfg = {});

/// Hessian of u -> Phi_m(u; gamma) for a correlation matrix gamma.
/// Off-diagonal entries reduce to a bivariate density times Phi_{m-2};
/// diagonal entries follow from differentiating the gradient component.
Matrix cdf_hessian(const Vector& tau, const Matrix& gamma, const IntegrationConfig& cfg = {});

/// Same derivatives for a general SPD covariance (internal standardization).
Vector cdf_gradient_cov(const Vector& u, const Matrix& sigma, const IntegrationConfig& cfg = {});
Matrix cdf_hessian_cov(const Vector& u, const Matrix& sigma, const IntegrationConfig& cfg = {});

struct LogCdfDerivs {
  double value = 0.0;  // log Phi_m(u; sigma)
  Vector gradient;
  Matrix hessian;      // empty unless requested
  bool converged = true;
};

/// log Phi_m and its derivatives in one call; the Hessian of the log is
/// negative semidefinite (log-concavity of Phi_m).
LogCdfDerivs logcdf_derivs_cov(const Vector& u, const Matrix& sigma,
                               const IntegrationConfig& cfg, bool want_hessian);

/// P(X <= b1, Y <= b2) for standard bivariate normal with correlation rho.
double bvn_cdf(double b1, double b2, double rho);

/// Throws NotCorrelationMatrix unless gamma is symmetric with unit diagonal
/// (within 1e-12) and smallest eigenvalue >= 1e-10.
void check_correlation(const Matrix& gamma);

}  // namespace sun::mvn
