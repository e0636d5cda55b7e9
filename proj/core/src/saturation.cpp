// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "overflow/saturation.hpp"

#include <cmath>
#include <string>

#include "overflow/dct.hpp"
#include "overflow/error.hpp"

namespace overflow {

namespace {

constexpr double kClampDrift = 1e-9;

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

double hoyer(std::span<const double> v) {
  const std::size_t d = v.size();
  if (d < 2) throw DomainError("hoyer: need at least 2 components, got " + std::to_string(d));
  // Scale by the max magnitude first so the squared norm cannot overflow.
  const double scale = max_abs(v);
  if (scale == 0.0) throw DomainError("hoyer: zero vector");
  double l1 = 0.0;
  double l2sq = 0.0;
  for (double x : v) {
    const double y = x / scale;
    l1 += std::abs(y);
    l2sq += y * y;
  }
  const double sqrt_d = std::sqrt(static_cast<double>(d));
  double h = (sqrt_d - l1 / std::sqrt(l2sq)) / (sqrt_d - 1.0);
  if (h < 0.0 && h > -kClampDrift) h = 0.0;
  if (h > 1.0 && h < 1.0 + kClampDrift) h = 1.0;
  return h;
}

double spectral_entropy(std::span<const double> v) {
  if (v.empty() || max_abs(v) == 0.0) throw DomainError("spectral_entropy: zero vector");
  const std::vector<double> coeffs = dct2(v);
  double total = 0.0;
  for (double c : coeffs) total += c * c;
  if (!(total > 0.0)) throw DomainError("spectral_entropy: zero spectral energy");
  double h = 0.0;
  for (double c : coeffs) {
    const double p = c * c / total;
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

double excess_kurtosis(std::span<const double> v) {
  const std::size_t d = v.size();
  if (d < 2) throw DomainError("excess_kurtosis: need at least 2 components");
  const double n = static_cast<double>(d);
  double mu = 0.0;
  for (double x : v) mu += x;
  mu /= n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double x : v) {
    const double c = (x - mu) * (x - mu);
    m2 += c;
    m4 += c * c;
  }
  m2 /= n;
  m4 /= n;
  // Treat spread at rounding level of the mean as zero (constant vector).
  if (!(std::sqrt(m2) > 1e-12 * max_abs(v))) throw DomainError("excess_kurtosis: zero variance (constant vector)");
  return m4 / (m2 * m2) - 3.0;
}

SaturationStats saturation_profile(std::span<const double> v) {
  SaturationStats s;
  s.hoyer = hoyer(v);
  s.spectral_entropy = spectral_entropy(v);
  s.excess_kurtosis = excess_kurtosis(v);
  return s;
}

std::array<double, 12> AggregatedStats::as_array() const {
  std::array<double, 12> out{};
  std::size_t i = 0;
  for (const Summary* s : {&hoyer, &spectral_entropy, &excess_kurtosis}) {
    out[i++] = s->mean;
    out[i++] = s->max;
    out[i++] = s->min;
    out[i++] = s->std;
  }
  return out;
}

AggregatedStats aggregate_saturation(std::span<const SaturationStats> profiles) {
  if (profiles.empty()) throw DomainError("aggregate_saturation: empty profile list");
  std::vector<double> h, e, k;
  h.reserve(profiles.size());
  e.reserve(profiles.size());
  k.reserve(profiles.size());
  for (const auto& p : profiles) {
    h.push_back(p.hoyer);
    e.push_back(p.spectral_entropy);
    k.push_back(p.excess_kurtosis);
  }
  return {summarize(h), summarize(e), summarize(k)};
}

}  // namespace overflow
