// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "overflow/stats.hpp"
#include "overflow/tensor.hpp"

namespace overflow {

using IndexSet = std::span<const std::int64_t>;

/// Layers to include; empty means every layer of the tensor.
using LayerSelection = std::span<const std::size_t>;

inline constexpr double kRatioFloor = 1e-12;
inline constexpr double kRatioCap = 1e6;
inline constexpr double kRowSumTolerance = 1e-3;

/// Per (layer, head): (1/|T_q|) sum_{i in T_q} sum_{j in S} A[l, h, i, j].
/// Rows indexed by selected layer, columns by head.
Eigen::MatrixXd mean_attention_to(const Tensor& attn, IndexSet query, IndexSet targets, LayerSelection layers = {});

struct RatioResult {
  Eigen::MatrixXd ratio;
  std::size_t capped = 0;  ///< (layer, head) cells whose denominator fell below the floor
};

/// Per-token-averaged attention to T_x over per-token-averaged attention to
/// T_nonx. Denominator floored at kRatioFloor, result capped at kRatioCap.
RatioResult attention_ratio(const Tensor& attn, IndexSet query, IndexSet xrag, IndexSet non_xrag,
                            LayerSelection layers = {});

/// Row entropies (nats) after renormalizing each row over its support.
/// Shape: (selected layers * heads) x |positions|.
Eigen::MatrixXd attention_entropy(const Tensor& attn, IndexSet positions, LayerSelection layers = {});

struct AttentionFeatures {
  Summary xrag_mass;
  Summary ratio;
  Summary entropy;
  std::size_t ratio_capped = 0;
  std::size_t rows_off_simplex = 0;  ///< query rows whose sum strays from 1 by more than kRowSumTolerance

  /// (xrag_mass, ratio, entropy) x (mean, max, min, std).
  std::array<double, 12> as_array() const;
};

AttentionFeatures attention_feature_vector(const Tensor& attn, IndexSet query, IndexSet xrag, IndexSet non_xrag,
                                           LayerSelection layers = {});

/// Positions in [0, T) that are in neither `xrag` nor `query`.
std::vector<std::int64_t> complement_positions(std::size_t seq_len, IndexSet xrag, IndexSet query);

}  // namespace overflow
