// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "overflow/roc_auc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "overflow/error.hpp"

namespace overflow {

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DomainError("roc_auc: scores and labels differ in length");
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw DomainError("roc_auc: non-finite score at index " + std::to_string(i));
    if (labels[i] != 0 && labels[i] != 1) throw DomainError("roc_auc: labels must be 0 or 1");
    n_pos += static_cast<std::size_t>(labels[i]);
  }
  const std::size_t n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw SingleClassError("roc_auc: labels contain a single class");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of 1-based average ranks of the positives. Ranks are half-integers,
  // so twice the sum stays exact in integer arithmetic.
  unsigned long long twice_rank_sum = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const unsigned long long twice_avg = static_cast<unsigned long long>(i + 1 + j + 1);
    for (std::size_t t = i; t <= j; ++t) {
      if (labels[order[t]] == 1) twice_rank_sum += twice_avg;
    }
    i = j + 1;
  }
  const unsigned long long twice_min = static_cast<unsigned long long>(n_pos) * (n_pos + 1);
  const double u = static_cast<double>(twice_rank_sum - twice_min) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace overflow
