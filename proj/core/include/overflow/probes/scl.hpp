// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <span>

#include "overflow/probes/network.hpp"

namespace overflow {

/// Supervised contrastive loss over the rows of `z` (L2-normalized
/// internally, eps 1e-12):
///   L = mean_{i : P(i) != {}} -1/|P(i)| sum_{p in P(i)} log( exp(z_i.z_p / tau) / sum_{a != i} exp(z_i.z_a / tau) )
/// Anchors without a same-label partner are skipped. If no anchor has a
/// positive the loss is 0. Throws DomainError for fewer than two rows or
/// tau <= 0. `grad` (optional) receives dL/dz with z's shape.
template <typename S>
S scl_loss(const Mat<S>& z, std::span<const int> labels, S tau, Mat<S>* grad = nullptr);

}  // namespace overflow
