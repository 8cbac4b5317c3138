#pragma once

#include <cstdint>
#include <random>

namespace sun {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2*pi)
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))

/// Standard normal density, log-density, distribution function and quantile.
/// norm_cdf is accurate to full double precision via erfc; norm_quantile is
/// the Wichura rational approximation (relative error below 1e-15).
double norm_pdf(double x);
double norm_logpdf(double x);
double norm_cdf(double x);
double norm_quantile(double p);

/// Mean of a standard normal truncated to (-inf, b]: -phi(b)/Phi(b),
/// evaluated stably far into the left tail.
double truncated_lower_mean(double b);

/// SplitMix64 step, used to derive independent per-chunk seeds from a master
/// seed. Deterministic, and distinct streams never share state.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream);

/// mt19937_64 with inverse-CDF normal draws so the produced values do not
/// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  double normal() { return norm_quantile(uniform()); }

  std::uint64_t bits() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace sun
