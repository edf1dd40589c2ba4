#include "windflow/wind/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace windflow::wind {

std::string_view to_string(Family f) { return f == Family::Weibull ? "weibull" : "rayleigh"; }

Family parse_family(std::string_view s) {
  if (s == "weibull") return Family::Weibull;
  if (s == "rayleigh") return Family::Rayleigh;
  throw std::invalid_argument("unknown distribution family '" + std::string(s) + "' (expected weibull or rayleigh)");
}

WindDistribution WindDistribution::weibull(double k, double lambda) {
  if (!(k > 0.0) || !(lambda > 0.0)) throw std::invalid_argument("Weibull parameters must be positive");
  return {Family::Weibull, k, lambda, 0};
}

WindDistribution WindDistribution::rayleigh(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("Rayleigh scale must be positive");
  return {Family::Rayleigh, 2.0, sigma, 0};
}

double WindDistribution::pdf(double u) const {
  if (u < 0.0) return 0.0;
  if (family == Family::Rayleigh) {
    const double s2 = scale * scale;
    return u / s2 * std::exp(-u * u / (2.0 * s2));
  }
  if (u == 0.0) return shape < 1.0 ? INFINITY : (shape == 1.0 ? 1.0 / scale : 0.0);
  const double z = u / scale;
  return shape / scale * std::pow(z, shape - 1.0) * std::exp(-std::pow(z, shape));
}

double WindDistribution::cdf(double u) const {
  if (u <= 0.0) return 0.0;
  if (family == Family::Rayleigh) return -std::expm1(-u * u / (2.0 * scale * scale));
  return -std::expm1(-std::pow(u / scale, shape));
}

double WindDistribution::quantile(double p) const {
  if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("quantile probability must lie in [0, 1)");
  const double t = -std::log1p(-p);
  if (family == Family::Rayleigh) return scale * std::sqrt(2.0 * t);
  return scale * std::pow(t, 1.0 / shape);
}

WindDistribution fit_distribution(std::span<const double> samples, Family family) {
  const auto n = samples.size();
  if (n < 30) throw std::invalid_argument("need at least 30 wind-speed samples, got " + std::to_string(n));
  for (double x : samples) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("wind-speed samples must be positive and finite");
  }
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  if (*lo == *hi) throw std::invalid_argument("degenerate sample: all wind speeds are equal");

  const double dn = static_cast<double>(n);
  if (family == Family::Rayleigh) {
    double s2 = 0.0;
    for (double x : samples) s2 += x * x;
    auto d = WindDistribution::rayleigh(std::sqrt(s2 / (2.0 * dn)));
    d.source_sample_size = n;
    return d;
  }

  // Profile likelihood in k: g(k) = sum x^k ln x / sum x^k - 1/k - mean ln x.
  // g is increasing, so Newton from the moment estimate with a bisection
  // fallback converges. Speeds are scaled by the max to keep x^k bounded.
  std::vector<double> lx(n);
  for (std::size_t i = 0; i < n; ++i) lx[i] = std::log(samples[i] / *hi);
  const double mean_lx = std::accumulate(lx.begin(), lx.end(), 0.0) / dn;
  auto g = [&](double k, double* dg) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (double l : lx) {
      const double w = std::exp(k * l);
      s0 += w;
      s1 += w * l;
      s2 += w * l * l;
    }
    const double a = s1 / s0;
    if (dg) *dg = s2 / s0 - a * a + 1.0 / (k * k);
    return a - 1.0 / k - mean_lx;
  };
  double k_lo = 1e-3, k_hi = 1.0;
  while (g(k_hi, nullptr) < 0.0) k_hi *= 2.0;
  double k = 0.5 * (k_lo + k_hi);
  for (int it = 0; it < 200; ++it) {
    double dg = 0.0;
    const double v = g(k, &dg);
    if (v < 0.0) k_lo = k; else k_hi = k;
    double next = k - v / dg;
    if (!(next > k_lo && next < k_hi)) next = 0.5 * (k_lo + k_hi);
    if (std::abs(next - k) <= 1e-14 * k) {
      k = next;
      break;
    }
    k = next;
  }
  double sk = 0.0;
  for (double l : lx) sk += std::exp(k * l);
  auto d = WindDistribution::weibull(k, *hi * std::pow(sk / dn, 1.0 / k));
  d.source_sample_size = n;
  return d;
}

std::vector<double> sample(const WindDistribution& d, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  // Rayleigh(sigma) is Weibull(2, sigma sqrt 2).
  const double k = d.family == Family::Rayleigh ? 2.0 : d.shape;
  const double lambda = d.family == Family::Rayleigh ? d.scale * std::sqrt(2.0) : d.scale;
  std::weibull_distribution<double> dist(k, lambda);
  std::vector<double> out(n);
  for (auto& x : out) x = dist(gen);
  return out;
}

}  // namespace windflow::wind
