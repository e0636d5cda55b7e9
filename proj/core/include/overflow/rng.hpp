// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <cstdint>
#include <random>

namespace overflow {

using Rng = std::mt19937_64;

/// Counter-based seed derivation: the child seed depends only on
/// (root, stream, index), so drawing for instance i never perturbs instance j.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t root, std::uint64_t stream, std::uint64_t index = 0) {
  return Rng(derive_seed(root, stream, index));
}

/// Fixed stream identifiers. Values are part of the reproducibility
/// contract; never renumber.
namespace streams {
inline constexpr std::uint64_t kSynthGlobal = 1;
inline constexpr std::uint64_t kSynthInstance = 2;
inline constexpr std::uint64_t kTokenCorpus = 3;
inline constexpr std::uint64_t kFolds = 4;
inline constexpr std::uint64_t kProbeInit = 5;
inline constexpr std::uint64_t kProbeShuffle = 6;
inline constexpr std::uint64_t kProbeDropout = 7;
inline constexpr std::uint64_t kValidationSplit = 8;
inline constexpr std::uint64_t kPermutation = 9;
inline constexpr std::uint64_t kFoldProbe = 10;
}  // namespace streams

}  // namespace overflow
