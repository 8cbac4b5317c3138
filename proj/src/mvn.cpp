#include "sun/mvn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "sun/errors.hpp"
#include "sun/parallel.hpp"
#include "sun/rng.hpp"

namespace sun::mvn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxDim = 16;

// Gauss-Legendre half-nodes and weights (6, 12, 20 point rules).
const double kGlX6[3] = {0.9324695142031522, 0.6612093864662647, 0.2386191860831970};
const double kGlW6[3] = {0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
const double kGlX12[6] = {0.9815606342467191, 0.9041172563704750, 0.7699026741943050,
                          0.5873179542866171, 0.3678314989981802, 0.1252334085114692};
const double kGlW12[6] = {0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                          0.2031674267230659,  0.2334925365383547, 0.2491470458134029};
const double kGlX20[10] = {0.9931285991850949,  0.9639719272779138, 0.9122344282513259,
                           0.8391169718222188,  0.7463319064601508, 0.6360536807265150,
                           0.5108670019508271,  0.3737060887154196, 0.2277858511416451,
                           0.07652652113349733};
const double kGlW20[10] = {0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                           0.08327674157670475, 0.1019301198172404,  0.1181945319615184,
                           0.1316886384491766,  0.1420961093183821,  0.1491729864726037,
                           0.1527533871307259};

double phi2(double x, double y, double rho) {
  const double omr = (1.0 - rho) * (1.0 + rho);
  return std::exp(-0.5 * (x * x - 2.0 * rho * x * y + y * y) / omr) /
         (kTwoPi * std::sqrt(omr));
}

void check_square_symmetric(const Matrix& sigma, const char* who) {
  if (sigma.rows() != sigma.cols())
    fail(ErrorCode::ShapeMismatch, std::string(who) + ": covariance not square");
  if (!is_symmetric(sigma, 1e-12))
    fail(ErrorCode::InvalidArgument, std::string(who) + ": covariance not symmetric");
}

// P(X > h, Y > k) for standard bivariate normal, correlation r.
// Hybrid Gauss-Legendre scheme of Drezner & Wesolowsky as refined by Genz;
// absolute error below 5e-16.
double bvnu(double h, double k, double r) {
  const double* xg;
  const double* wg;
  int lg;
  const double ar = std::fabs(r);
  if (ar < 0.3) {
    xg = kGlX6; wg = kGlW6; lg = 3;
  } else if (ar < 0.75) {
    xg = kGlX12; wg = kGlW12; lg = 6;
  } else {
    xg = kGlX20; wg = kGlW20; lg = 10;
  }
  double hk = h * k;
  double bvn = 0.0;
  if (ar < 0.925) {
    if (ar > 0.0) {
      const double hs = 0.5 * (h * h + k * k);
      const double asr = std::asin(r);
      for (int i = 0; i < lg; ++i) {
        for (int is = -1; is <= 1; is += 2) {
          const double sn = std::sin(0.5 * asr * (is * xg[i] + 1.0));
          bvn += wg[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
        }
      }
      bvn *= asr / (2.0 * kTwoPi);
    }
    bvn += norm_cdf(-h) * norm_cdf(-k);
  } else {
    if (r < 0.0) {
      k = -k;
      hk = -hk;
    }
    if (ar < 1.0) {
      const double as = (1.0 - r) * (1.0 + r);
      double a = std::sqrt(as);
      const double bs = (h - k) * (h - k);
      const double c = (4.0 - hk) / 8.0;
      const double d = (12.0 - hk) / 16.0;
      double asr = -0.5 * (bs / as + hk);
      if (asr > -100.0)
        bvn = a * std::exp(asr) *
              (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
      if (-hk < 100.0) {
        const double b = std::sqrt(bs);
        bvn -= std::exp(-0.5 * hk) * std::sqrt(kTwoPi) * norm_cdf(-b / a) * b *
               (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
      }
      a *= 0.5;
      for (int i = 0; i < lg; ++i) {
        for (int is = -1; is <= 1; is += 2) {
          double xs = a * (is * xg[i] + 1.0);
          xs = xs * xs;
          asr = -0.5 * (bs / xs + hk);
          if (asr > -100.0) {
            const double rs = std::sqrt(1.0 - xs);
            const double sp = 1.0 + c * xs * (1.0 + d * xs);
            const double ep = std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs;
            bvn += a * wg[i] * std::exp(asr) * (ep - sp);
          }
        }
      }
      bvn = -bvn / kTwoPi;
    }
    if (r > 0.0) {
      bvn += norm_cdf(-std::max(h, k));
    } else {
      bvn = -bvn;
      if (k > h) bvn += norm_cdf(k) - norm_cdf(h);
    }
  }
  return std::clamp(bvn, 0.0, 1.0);
}

// Trivariate CDF via Plackett's identity: start from the member of the
// correlation family where variable 0 is independent of the pair with the
// strongest correlation, then integrate the two correlation corrections
// along a linear path. Composite 20-point Gauss-Legendre with panel
// doubling; absolute error around 1e-14 for well-conditioned matrices.
struct TvnResult {
  double value;
  double error;
};

TvnResult tvn_cdf(const Vector& b, const Matrix& r) {
  // label so that the fixed correlation is the strongest one
  int j = 1, k = 2, i0 = 0;
  double best = std::fabs(r(1, 2));
  if (std::fabs(r(0, 2)) > best) {
    best = std::fabs(r(0, 2));
    j = 0; k = 2; i0 = 1;
  }
  if (std::fabs(r(0, 1)) > best) {
    j = 0; k = 1; i0 = 2;
  }
  const double b1 = b(i0), b2 = b(j), b3 = b(k);
  const double r21 = r(i0, j), r31 = r(i0, k), r32 = r(j, k);

  const double base = norm_cdf(b1) * bvn_cdf(b2, b3, r32);
  if (r21 == 0.0 && r31 == 0.0) return {base, 1e-15};

  auto conditional_cdf = [](double bt, double mean, double varc) {
    if (varc < 1e-26) return (bt - mean >= 0.0) ? 1.0 : 0.0;
    return norm_cdf((bt - mean) / std::sqrt(varc));
  };
  auto integrand = [&](double t) {
    double f = 0.0;
    const double c21 = t * r21, c31 = t * r31;
    if (r21 != 0.0) {
      const double om = 1.0 - c21 * c21;
      const double m3 = ((c31 - c21 * r32) * b1 + (r32 - c21 * c31) * b2) / om;
      const double v3 = 1.0 - (c31 * c31 + r32 * r32 - 2.0 * c21 * c31 * r32) / om;
      f += r21 * phi2(b1, b2, c21) * conditional_cdf(b3, m3, v3);
    }
    if (r31 != 0.0) {
      const double om = 1.0 - c31 * c31;
      const double m2 = ((c21 - c31 * r32) * b1 + (r32 - c21 * c31) * b3) / om;
      const double v2 = 1.0 - (c21 * c21 + r32 * r32 - 2.0 * c21 * c31 * r32) / om;
      f += r31 * phi2(b1, b3, c31) * conditional_cdf(b2, m2, v2);
    }
    return f;
  };
  auto composite = [&](int panels) {
    double s = 0.0;
    const double hw = 0.5 / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = (2 * p + 1) * hw;
      for (int i = 0; i < 10; ++i) {
        s += kGlW20[i] * (integrand(mid - hw * kGlX20[i]) + integrand(mid + hw * kGlX20[i]));
      }
    }
    return s * hw;
  };
  double prev = composite(4);
  double cur = prev;
  double err = 1.0;
  for (int panels = 8; panels <= 64; panels *= 2) {
    cur = composite(panels);
    err = std::fabs(cur - prev);
    prev = cur;
    if (err <= 1e-14) break;
  }
  return {std::clamp(base + cur, 0.0, 1.0), std::max(err, 1e-15)};
}

// Variable-reordered Cholesky for the separation-of-variables integrand
// (most restrictive bound first, expected-value proxy for later stages).
void ordered_cholesky(Matrix a, Vector b, Matrix& lower, Vector& bound) {
  const int m = static_cast<int>(a.rows());
  Vector y = Vector::Zero(m);
  for (int i = 0; i < m; ++i) {
    int best = i;
    double best_p = 2.0;
    for (int jj = i; jj < m; ++jj) {
      double s = 0.0, ss = 0.0;
      for (int l = 0; l < i; ++l) {
        s += a(jj, l) * y(l);
        ss += a(jj, l) * a(jj, l);
      }
      const double dj = std::max(a(jj, jj) - ss, 1e-28);
      const double p = norm_cdf((b(jj) - s) / std::sqrt(dj));
      if (p < best_p) {
        best_p = p;
        best = jj;
      }
    }
    if (best != i) {
      a.row(i).swap(a.row(best));
      a.col(i).swap(a.col(best));
      std::swap(b(i), b(best));
    }
    double ss = 0.0;
    for (int l = 0; l < i; ++l) ss += a(i, l) * a(i, l);
    const double dii = std::max(a(i, i) - ss, 1e-28);
    a(i, i) = std::sqrt(dii);
    for (int jj = i + 1; jj < m; ++jj) {
      double s = 0.0;
      for (int l = 0; l < i; ++l) s += a(jj, l) * a(i, l);
      a(jj, i) = (a(jj, i) - s) / a(i, i);
    }
    double s = 0.0;
    for (int l = 0; l < i; ++l) s += a(i, l) * y(l);
    y(i) = truncated_lower_mean((b(i) - s) / a(i, i));
  }
  lower = a;
  bound = b;
}

// Integrand of the transformed probability at one point of the unit cube.
double sov_integrand(const Matrix& lower, const Vector& bound, const double* w) {
  const int m = static_cast<int>(bound.size());
  double y[kMaxDim];
  double p = 1.0;
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    for (int l = 0; l < i; ++l) s += lower(i, l) * y[l];
    const double bt = (bound(i) - s) / lower(i, i);
    const double e = norm_cdf(bt);
    p *= e;
    if (p <= 0.0) return 0.0;
    if (i + 1 < m) {
      const double t = std::clamp(w[i] * e, 1e-300, 1.0 - 1e-16);
      y[i] = norm_quantile(t);
    }
  }
  return p;
}

CdfResult qmc_cdf(const Vector& b, const Matrix& r, const IntegrationConfig& cfg) {
  const int m = static_cast<int>(b.size());
  Matrix lower;
  Vector bound;
  ordered_cholesky(r, b, lower, bound);

  const int ndim = m - 1;
  // sqrt-prime Richtmyer generators
  static const double primes[kMaxDim - 1] = {2,  3,  5,  7,  11, 13, 17, 19,
                                             23, 29, 31, 37, 41, 43, 47};
  double gen[kMaxDim - 1];
  for (int i = 0; i < ndim; ++i) {
    double g = std::sqrt(primes[i]);
    gen[i] = g - std::floor(g);
  }

  const int n_shifts = 8;
  CdfResult out;
  std::int64_t n = 1024;
  for (int level = 0;; ++level) {
    Rng shift_rng(split_seed(cfg.seed, 7000 + static_cast<std::uint64_t>(level)));
    std::vector<double> shifts(static_cast<std::size_t>(n_shifts) * ndim);
    for (double& s : shifts) s = shift_rng.uniform();

    std::vector<double> shift_mean(n_shifts, 0.0);
    run_chunks(n_shifts, cfg.threads, [&](int s) {
      const double* delta = shifts.data() + static_cast<std::size_t>(s) * ndim;
      double acc = 0.0, comp = 0.0;  // Kahan
      double w[kMaxDim - 1], wa[kMaxDim - 1];
      for (std::int64_t kk = 0; kk < n; ++kk) {
        for (int i = 0; i < ndim; ++i) {
          double v = std::fma(static_cast<double>(kk), gen[i], delta[i]);
          v -= std::floor(v);
          w[i] = v;
          wa[i] = 1.0 - v;
        }
        const double f =
            0.5 * (sov_integrand(lower, bound, w) + sov_integrand(lower, bound, wa));
        const double t = f - comp;
        const double sum = acc + t;
        comp = (sum - acc) - t;
        acc = sum;
      }
      shift_mean[s] = acc / static_cast<double>(n);
    });

    double mean = 0.0;
    for (double v : shift_mean) mean += v;
    mean /= n_shifts;
    double var = 0.0;
    for (double v : shift_mean) var += (v - mean) * (v - mean);
    var /= (n_shifts - 1);
    const double se = std::sqrt(var / n_shifts);

    out.value = std::clamp(mean, 0.0, 1.0);
    out.error_estimate = 3.0 * se;
    out.converged = out.error_estimate <= cfg.abs_tol;
    if (out.converged) return out;
    if (n_shifts * (n * 2) > cfg.max_points) return out;
    n *= 2;
  }
}

}  // namespace

double logpdf(const Vector& x, const Matrix& sigma) {
  check_square_symmetric(sigma, "mvn::logpdf");
  if (x.size() != sigma.rows())
    fail(ErrorCode::ShapeMismatch, "mvn::logpdf: point/covariance dimension mismatch");
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::NotPositiveDefinite, "mvn::logpdf: covariance not positive definite");
  const Matrix l = llt.matrixL();
  const Vector z = l.triangularView<Eigen::Lower>().solve(x);
  double logdet_half = 0.0;
  for (Index i = 0; i < l.rows(); ++i) logdet_half += std::log(l(i, i));
  return -0.5 * z.squaredNorm() - logdet_half -
         0.5 * static_cast<double>(x.size()) * std::log(kTwoPi);
}

double pdf(const Vector& x, const Matrix& sigma) { return std::exp(logpdf(x, sigma)); }

double bvn_cdf(double b1, double b2, double rho) { return bvnu(-b1, -b2, rho); }

void check_correlation(const Matrix& gamma) {
  if (gamma.rows() != gamma.cols())
    fail(ErrorCode::NotCorrelationMatrix, "correlation matrix must be square");
  if (!is_symmetric(gamma, 1e-12))
    fail(ErrorCode::NotCorrelationMatrix, "correlation matrix must be symmetric");
  for (Index i = 0; i < gamma.rows(); ++i)
    if (std::fabs(gamma(i, i) - 1.0) > 1e-12)
      fail(ErrorCode::NotCorrelationMatrix, "correlation matrix must have unit diagonal");
  if (gamma.cwiseAbs().maxCoeff() > 1.0 + 1e-12)
    fail(ErrorCode::NotCorrelationMatrix, "correlation entries must lie in [-1, 1]");
  if (min_eigenvalue(gamma) < 1e-10)
    fail(ErrorCode::NotCorrelationMatrix,
         "correlation matrix is singular or indefinite (min eigenvalue < 1e-10)");
}

CdfResult cdf(const Vector& u, const Matrix& sigma, const IntegrationConfig& cfg) {
  check_square_symmetric(sigma, "mvn::cdf");
  const int m_in = static_cast<int>(sigma.rows());
  if (u.size() != m_in)
    fail(ErrorCode::ShapeMismatch, "mvn::cdf: point/covariance dimension mismatch");
  if (m_in > kMaxDim)
    fail(ErrorCode::InvalidArgument, "mvn::cdf: dimension above supported envelope (16)");

  // standardize to a correlation matrix
  Vector d(m_in);
  for (int i = 0; i < m_in; ++i) {
    if (!(sigma(i, i) > 0.0))
      fail(ErrorCode::NotPositiveDefinite, "mvn::cdf: non-positive variance");
    d(i) = std::sqrt(sigma(i, i));
  }
  Vector b_all = u.cwiseQuotient(d);
  Matrix r_all = d.cwiseInverse().asDiagonal() * sigma * d.cwiseInverse().asDiagonal();

  // coordinates whose bound is numerically +inf contribute factor 1
  std::vector<int> keep;
  keep.reserve(m_in);
  for (int i = 0; i < m_in; ++i) {
    if (b_all(i) <= -40.0) return {0.0, 0.0, true};
    if (b_all(i) < 40.0) keep.push_back(i);
  }
  const int m = static_cast<int>(keep.size());
  if (m == 0) return {1.0, 0.0, true};
  Vector b(m);
  Matrix r(m, m);
  for (int i = 0; i < m; ++i) {
    b(i) = b_all(keep[i]);
    for (int j = 0; j < m; ++j) r(i, j) = r_all(keep[i], keep[j]);
  }

  if (min_eigenvalue(r) < 1e-10)
    fail(ErrorCode::NotPositiveDefinite,
         "mvn::cdf: covariance is singular or indefinite (min eigenvalue < 1e-10)");

  if (m == 1) return {norm_cdf(b(0)), 1e-16, true};
  if (m == 2) return {bvn_cdf(b(0), b(1), r(0, 1)), 5e-16, true};
  if (m == 3) {
    const TvnResult t = tvn_cdf(b, r);
    return {t.value, t.error, t.error <= cfg.abs_tol};
  }
  return qmc_cdf(b, r, cfg);
}

Vector cdf_gradient_cov(const Vector& u, const Matrix& sigma, const IntegrationConfig& cfg) {
  const int m = static_cast<int>(u.size());
  Vector g(m);
  if (m == 1) {
    const double sd = std::sqrt(sigma(0, 0));
    g(0) = norm_pdf(u(0) / sd) / sd;
    return g;
  }
  for (int j = 0; j < m; ++j) {
    const double sd = std::sqrt(sigma(j, j));
    const double dens = norm_pdf(u(j) / sd) / sd;
    Vector arg(m - 1);
    Matrix cov(m - 1, m - 1);
    int r = 0;
    for (int i = 0; i < m; ++i) {
      if (i == j) continue;
      arg(r) = u(i) - sigma(i, j) / sigma(j, j) * u(j);
      int c = 0;
      for (int k = 0; k < m; ++k) {
        if (k == j) continue;
        cov(r, c) = sigma(i, k) - sigma(i, j) * sigma(j, k) / sigma(j, j);
        ++c;
      }
      ++r;
    }
    g(j) = dens * cdf(arg, cov, cfg).value;
  }
  return g;
}

Vector cdf_gradient(const Vector& tau, const Matrix& gamma, const IntegrationConfig& cfg) {
  check_correlation(gamma);
  if (tau.size() != gamma.rows())
    fail(ErrorCode::ShapeMismatch, "mvn::cdf_gradient: dimension mismatch");
  return cdf_gradient_cov(tau, gamma, cfg);
}

namespace {

// Phi_{m-2} factor of a mixed second partial: condition coordinates (j,k)
// of N(0, sigma) at (u_j, u_k) and evaluate the remainder's CDF.
double conditioned_pair_cdf(const Vector& u, const Matrix& sigma, int j, int k,
                            const IntegrationConfig& cfg) {
  const int m = static_cast<int>(u.size());
  if (m == 2) return 1.0;
  Eigen::Matrix2d s2;
  s2 << sigma(j, j), sigma(j, k), sigma(k, j), sigma(k, k);
  const Eigen::Matrix2d s2inv = s2.inverse();
  const Eigen::Vector2d uj(u(j), u(k));
  Vector arg(m - 2);
  Matrix cov(m - 2, m - 2);
  int r = 0;
  for (int i = 0; i < m; ++i) {
    if (i == j || i == k) continue;
    const Eigen::Vector2d si(sigma(i, j), sigma(i, k));
    arg(r) = u(i) - si.dot(s2inv * uj);
    int c = 0;
    for (int l = 0; l < m; ++l) {
      if (l == j || l == k) continue;
      const Eigen::Vector2d sl(sigma(l, j), sigma(l, k));
      cov(r, c) = sigma(i, l) - si.dot(s2inv * sl);
      ++c;
    }
    ++r;
  }
  return cdf(arg, cov, cfg).value;
}

Matrix cdf_hessian_impl(const Vector& tau, const Matrix& gamma, const IntegrationConfig& cfg) {
  const int m = static_cast<int>(tau.size());
  Matrix h = Matrix::Zero(m, m);
  if (m == 1) {
    h(0, 0) = -tau(0) * norm_pdf(tau(0));
    return h;
  }
  for (int j = 0; j < m; ++j) {
    for (int k = j + 1; k < m; ++k) {
      const double val = phi2(tau(j), tau(k), gamma(j, k)) *
                         conditioned_pair_cdf(tau, gamma, j, k, cfg);
      h(j, k) = val;
      h(k, j) = val;
    }
  }
  for (int j = 0; j < m; ++j) {
    // reduce on coordinate j, then differentiate the Phi_{m-1} factor
    Vector w(m - 1), gcol(m - 1);
    Matrix cov(m - 1, m - 1);
    int r = 0;
    for (int i = 0; i < m; ++i) {
      if (i == j) continue;
      gcol(r) = gamma(i, j);
      w(r) = tau(i) - gamma(i, j) * tau(j);
      int c = 0;
      for (int k = 0; k < m; ++k) {
        if (k == j) continue;
        cov(r, c) = gamma(i, k) - gamma(i, j) * gamma(k, j);
        ++c;
      }
      ++r;
    }
    const double dens = norm_pdf(tau(j));
    const double tail = cdf(w, cov, cfg).value;
    const Vector inner_grad = cdf_gradient_cov(w, cov, cfg);
    h(j, j) = -tau(j) * dens * tail - dens * gcol.dot(inner_grad);
  }
  return h;
}

}  // namespace

Matrix cdf_hessian(const Vector& tau, const Matrix& gamma, const IntegrationConfig& cfg) {
  check_correlation(gamma);
  if (tau.size() != gamma.rows())
    fail(ErrorCode::ShapeMismatch, "mvn::cdf_hessian: dimension mismatch");
  return cdf_hessian_impl(tau, gamma, cfg);
}

Matrix cdf_hessian_cov(const Vector& u, const Matrix& sigma, const IntegrationConfig& cfg) {
  const int m = static_cast<int>(u.size());
  Vector d(m);
  for (int i = 0; i < m; ++i) d(i) = std::sqrt(sigma(i, i));
  const Matrix r = d.cwiseInverse().asDiagonal() * sigma * d.cwiseInverse().asDiagonal();
  const Vector b = u.cwiseQuotient(d);
  const Matrix h = cdf_hessian_impl(b, r, cfg);
  return d.cwiseInverse().asDiagonal() * h * d.cwiseInverse().asDiagonal();
}

LogCdfDerivs logcdf_derivs_cov(const Vector& u, const Matrix& sigma,
                               const IntegrationConfig& cfg, bool want_hessian) {
  const int m = static_cast<int>(u.size());
  Vector d(m);
  for (int i = 0; i < m; ++i) {
    if (!(sigma(i, i) > 0.0))
      fail(ErrorCode::NotPositiveDefinite, "logcdf_derivs: non-positive variance");
    d(i) = std::sqrt(sigma(i, i));
  }
  const Matrix r = d.cwiseInverse().asDiagonal() * sigma * d.cwiseInverse().asDiagonal();
  const Vector b = u.cwiseQuotient(d);

  LogCdfDerivs out;
  const CdfResult p = cdf(b, r, cfg);
  out.converged = p.converged;
  if (!(p.value > 0.0))
    fail(ErrorCode::ToleranceNotReached,
         "logcdf_derivs: probability underflowed to zero");
  out.value = std::log(p.value);
  const Vector g = cdf_gradient_cov(b, r, cfg);
  out.gradient = d.cwiseInverse().asDiagonal() * (g / p.value);
  if (want_hessian) {
    const Matrix h = cdf_hessian_impl(b, r, cfg);
    const Matrix hlog = h / p.value - (g / p.value) * (g / p.value).transpose();
    out.hessian = d.cwiseInverse().asDiagonal() * hlog * d.cwiseInverse().asDiagonal();
  }
  return out;
}

}  // namespace sun::mvn
