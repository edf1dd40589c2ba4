#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace windflow::wind {

enum class Family { Weibull, Rayleigh };

[[nodiscard]] std::string_view to_string(Family f);
/// Accepts "weibull" or "rayleigh"; throws std::invalid_argument otherwise.
[[nodiscard]] Family parse_family(std::string_view s);

/// Fitted wind-speed distribution (m/s). For Rayleigh only `scale` (sigma) is
/// used; for Weibull `shape` is k and `scale` is lambda.
struct WindDistribution {
  Family family = Family::Weibull;
  double shape = 2.0;
  double scale = 8.0;
  std::size_t source_sample_size = 0;

  [[nodiscard]] static WindDistribution weibull(double k, double lambda);
  [[nodiscard]] static WindDistribution rayleigh(double sigma);

  [[nodiscard]] double pdf(double u) const;
  [[nodiscard]] double cdf(double u) const;
  /// Inverse cdf for p in [0, 1).
  [[nodiscard]] double quantile(double p) const;
};

/// Maximum-likelihood fit. Needs at least 30 strictly positive, not all
/// equal samples; throws std::invalid_argument otherwise.
[[nodiscard]] WindDistribution fit_distribution(std::span<const double> samples, Family family);

/// Seeded draws from the distribution.
[[nodiscard]] std::vector<double> sample(const WindDistribution& d, std::size_t n, std::uint64_t seed);

}  // namespace windflow::wind
