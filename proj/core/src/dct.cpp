// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "overflow/dct.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace overflow {

namespace {

// FFTW planning is not thread-safe; executing a plan on new arrays is.
class PlanCache {
 public:
  fftw_plan get(int n) {
    std::lock_guard lock(mu_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    auto* in = fftw_alloc_real(static_cast<std::size_t>(n));
    auto* out = fftw_alloc_real(static_cast<std::size_t>(n));
    fftw_plan p = fftw_plan_r2r_1d(n, in, out, FFTW_REDFT10, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(n, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [n, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  std::mutex mu_;
  std::map<int, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

std::vector<double> dct2(std::span<const double> v) {
  const std::size_t d = v.size();
  if (d == 0) return {};
  std::vector<double> in(v.begin(), v.end());
  std::vector<double> out(d);
  fftw_execute_r2r(plan_cache().get(static_cast<int>(d)), in.data(), out.data());
  // REDFT10 yields 2 * sum_j v_j cos(...); rescale to the orthonormal basis.
  const double s0 = std::sqrt(1.0 / static_cast<double>(d)) * 0.5;
  const double sk = std::sqrt(2.0 / static_cast<double>(d)) * 0.5;
  out[0] *= s0;
  for (std::size_t k = 1; k < d; ++k) out[k] *= sk;
  return out;
}

std::vector<double> dct2_naive(std::span<const double> v) {
  const std::size_t d = v.size();
  std::vector<double> out(d, 0.0);
  const double nd = static_cast<double>(d);
  for (std::size_t k = 0; k < d; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      acc += v[j] * std::cos(std::numbers::pi * static_cast<double>((2 * j + 1) * k) / (2.0 * nd));
    }
    out[k] = acc * (k == 0 ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd));
  }
  return out;
}

}  // namespace overflow
