// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>

#include "overflow/error.hpp"

namespace overflow {

/// mean / max / min / population std of a set of values.
struct Summary {
  double mean = 0.0;
  double max = 0.0;
  double min = 0.0;
  double std = 0.0;
};

inline Summary summarize(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("cannot summarize an empty set");
  Summary s;
  const auto n = static_cast<double>(xs.size());
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  s.min = *lo;
  s.max = *hi;
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / n);
  // Rounding can push the mean a hair outside [min, max] for near-constant sets.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

}  // namespace overflow
