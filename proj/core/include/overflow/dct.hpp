// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <span>
#include <vector>

namespace overflow {

/// Orthonormal DCT-II:
///   X_k = s_k * sum_j v_j cos(pi (2j + 1) k / (2d)),  s_0 = sqrt(1/d), s_k = sqrt(2/d).
/// O(d log d) via FFTW's REDFT10.
std::vector<double> dct2(std::span<const double> v);

/// The same transform by direct O(d^2) summation. Reference path.
std::vector<double> dct2_naive(std::span<const double> v);

}  // namespace overflow
