// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "overflow/error.hpp"
#include "overflow/folds.hpp"
#include "overflow/roc_auc.hpp"

using namespace overflow;

namespace {

std::vector<int> positives_per_fold(const std::vector<int>& y, const std::vector<int>& fold, int k) {
  std::vector<int> out(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < y.size(); ++i) out[static_cast<std::size_t>(fold[i])] += y[i];
  return out;
}

}  // namespace

TEST_CASE("folds: divisible case") {
  std::vector<int> y(50, 0);
  std::fill(y.begin(), y.begin() + 10, 1);
  const auto f = stratified_folds(y, 5, 7);
  const auto pos = positives_per_fold(y, f, 5);
  for (int p : pos) CHECK(p == 2);
  std::vector<int> sizes(5, 0);
  for (int v : f) ++sizes[static_cast<std::size_t>(v)];
  for (int s : sizes) CHECK(s == 10);
}

TEST_CASE("folds: remainder and determinism") {
  std::vector<int> y(40, 0);
  std::fill(y.begin(), y.begin() + 11, 1);
  const auto f = stratified_folds(y, 5, 3);
  auto pos = positives_per_fold(y, f, 5);
  std::sort(pos.begin(), pos.end());
  CHECK(pos == std::vector<int>{2, 2, 2, 2, 3});
  CHECK(stratified_folds(y, 5, 3) == f);
  CHECK(stratified_folds(y, 5, 4) != f);
}

TEST_CASE("folds: errors") {
  std::vector<int> y(20, 0);
  CHECK_THROWS_AS(stratified_folds(y, 5, 1), SingleClassError);
  y[0] = y[1] = y[2] = 1;
  CHECK_THROWS_AS(stratified_folds(y, 5, 1), DomainError);
  CHECK_THROWS_AS(stratified_folds(y, 1, 1), DomainError);
}

TEST_CASE("auc: hand values") {
  using D = std::vector<double>;
  using I = std::vector<int>;
  CHECK(roc_auc(D{0.9, 0.8, 0.2, 0.1}, I{1, 1, 0, 0}) == 1.0);
  CHECK(roc_auc(D{0.3, 0.3, 0.3, 0.3}, I{1, 0, 1, 0}) == 0.5);
  CHECK(roc_auc(D{0.9, 0.4, 0.6, 0.2}, I{1, 0, 0, 1}) == 0.5);
  CHECK_THROWS_AS(roc_auc(D{0.1, 0.2}, I{1, 1}), SingleClassError);
  CHECK_THROWS_AS(roc_auc(D{0.1, 0.2}, I{1}), DomainError);
}

TEST_CASE("auc: pairwise oracle, monotone transforms and reversal") {
  std::mt19937_64 rng(500);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 20 + rng() % 200;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = trial % 2 ? static_cast<double>(rng() % 5) : static_cast<double>(rng() % 100000) / 7.0;
      y[i] = static_cast<int>(rng() % 3 == 0);
    }
    y[0] = 1;
    y[1] = 0;
    const double a = roc_auc(s, y);
    CHECK(std::abs(a - oracle::pairwise_auc(s, y)) < 1e-12);

    std::vector<double> t(n), neg(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = std::exp(0.01 * s[i]) * 3.0 - 1.0;
      neg[i] = -s[i];
    }
    CHECK(roc_auc(t, y) == a);
    if (trial % 2 == 0) {
      std::vector<double> u = s;
      std::sort(u.begin(), u.end());
      if (std::adjacent_find(u.begin(), u.end()) == u.end()) CHECK(std::abs(a + roc_auc(neg, y) - 1.0) < 1e-12);
    }
  }
}
