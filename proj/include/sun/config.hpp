#pragma once

#include <cstdint>

namespace sun {

/// Accuracy/budget knobs shared by every quadrature and sampling engine.
/// Every engine is a deterministic function of its inputs and this config;
/// there is no ambient entropy anywhere in the library.
struct IntegrationConfig {
  double abs_tol = 1e-8;
  std::int64_t max_points = std::int64_t{1} << 20;
  std::uint64_t seed = 0;
  /// Worker threads for chunked evaluation. Results are accumulated in a
  /// fixed chunk order, so the value never changes any output bit.
  int threads = 1;
};

}  // namespace sun
