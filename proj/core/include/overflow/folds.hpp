// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace overflow {

/// Fold id in [0, k) for every row. Each class is shuffled with its own
/// seeded stream and dealt round-robin, continuing where the previous class
/// stopped, so fold sizes and per-class counts both differ by at most one.
/// Throws SingleClassError for one class and DomainError when a class has
/// fewer than k members.
std::vector<int> stratified_folds(std::span<const int> y, int k, std::uint64_t seed);

}  // namespace overflow
