// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <array>
#include <span>
#include <vector>

#include "overflow/stats.hpp"

namespace overflow {

/// Hoyer sparsity (sqrt(d) - |v|_1/|v|_2) / (sqrt(d) - 1), in [0, 1].
/// Requires d >= 2 and a non-zero vector.
double hoyer(std::span<const double> v);

/// Shannon entropy (nats) of the normalized orthonormal-DCT-II energy
/// spectrum. Lies in [0, ln d].
double spectral_entropy(std::span<const double> v);

/// Excess kurtosis with population moments across dimensions.
/// Requires d >= 2 and non-zero spread.
double excess_kurtosis(std::span<const double> v);

struct SaturationStats {
  double hoyer = 0.0;
  double spectral_entropy = 0.0;
  double excess_kurtosis = 0.0;

  std::array<double, 3> as_array() const { return {hoyer, spectral_entropy, excess_kurtosis}; }
};

/// All three statistics; any domain error fails the whole profile.
SaturationStats saturation_profile(std::span<const double> v);

struct AggregatedStats {
  Summary hoyer;
  Summary spectral_entropy;
  Summary excess_kurtosis;

  /// Ordered (hoyer, spectral_entropy, excess_kurtosis) x (mean, max, min, std).
  std::array<double, 12> as_array() const;
};

AggregatedStats aggregate_saturation(std::span<const SaturationStats> profiles);

}  // namespace overflow
