// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "overflow/folds.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <string>

#include "overflow/error.hpp"
#include "overflow/rng.hpp"

namespace overflow {

std::vector<int> stratified_folds(std::span<const int> y, int k, std::uint64_t seed) {
  if (k < 2) throw DomainError("stratified_folds: k must be >= 2");
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 0 && y[i] != 1) throw DomainError("stratified_folds: labels must be 0 or 1");
    by_class[static_cast<std::size_t>(y[i])].push_back(i);
  }
  if (by_class[0].empty() || by_class[1].empty()) {
    throw SingleClassError("stratified_folds: labels contain a single class");
  }
  for (int c = 0; c < 2; ++c) {
    if (by_class[static_cast<std::size_t>(c)].size() < static_cast<std::size_t>(k)) {
      throw DomainError("stratified_folds: class " + std::to_string(c) + " has " +
                        std::to_string(by_class[static_cast<std::size_t>(c)].size()) + " members, fewer than k = " +
                        std::to_string(k));
    }
  }

  // Which fold receives the remainder is decided by a seeded relabeling.
  std::vector<int> relabel(static_cast<std::size_t>(k));
  std::iota(relabel.begin(), relabel.end(), 0);
  Rng perm_rng = make_rng(seed, streams::kPermutation, 0);
  std::shuffle(relabel.begin(), relabel.end(), perm_rng);

  std::vector<int> fold(y.size(), -1);
  std::size_t offset = 0;
  for (std::size_t c = 0; c < 2; ++c) {
    auto idx = by_class[c];
    Rng rng = make_rng(seed, streams::kFolds, c);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      fold[idx[j]] = relabel[(offset + j) % static_cast<std::size_t>(k)];
    }
    offset = (offset + idx.size()) % static_cast<std::size_t>(k);
  }
  return fold;
}

}  // namespace overflow
