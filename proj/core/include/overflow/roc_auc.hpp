// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <span>

namespace overflow {

/// Exact Mann-Whitney AUC, (concordant + 0.5 tied) / (P N), from average
/// ranks. Throws SingleClassError when one class is absent and DomainError on
/// non-finite scores or a length mismatch.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

}  // namespace overflow
