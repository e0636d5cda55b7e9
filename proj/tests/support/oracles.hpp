// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

// Slow, direct reference implementations used to check the library. Nothing
// here calls into overflow:: numerics.

#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace oracle {

using ld = long double;

inline constexpr ld kPi = 3.141592653589793238462643383279502884L;

inline double hoyer(std::span<const double> v) {
  ld l1 = 0, l2 = 0;
  for (double x : v) {
    l1 += std::fabs(static_cast<ld>(x));
    l2 += static_cast<ld>(x) * x;
  }
  const ld sd = std::sqrt(static_cast<ld>(v.size()));
  return static_cast<double>((sd - l1 / std::sqrt(l2)) / (sd - 1));
}

/// Orthonormal DCT-II by the defining double sum. The cosine argument
/// pi*(2j+1)k/(2d) is reduced to an integer index mod 4d so one table serves
/// every (j, k).
inline std::vector<ld> dct(std::span<const double> v) {
  const std::size_t d = v.size();
  const std::size_t period = 4 * d;
  std::vector<ld> table(period);
  for (std::size_t m = 0; m < period; ++m) table[m] = std::cos(kPi * static_cast<ld>(m) / (2 * static_cast<ld>(d)));
  std::vector<ld> out(d);
  for (std::size_t k = 0; k < d; ++k) {
    ld acc = 0;
    std::size_t idx = k % period;  // (2j+1)k for j = 0
    const std::size_t step = (2 * k) % period;
    for (std::size_t j = 0; j < d; ++j) {
      acc += static_cast<ld>(v[j]) * table[idx];
      idx += step;
      if (idx >= period) idx -= period;
    }
    out[k] = acc * std::sqrt((k == 0 ? 1.0L : 2.0L) / static_cast<ld>(d));
  }
  return out;
}

inline double spectral_entropy(std::span<const double> v) {
  const auto c = dct(v);
  ld total = 0;
  for (ld x : c) total += x * x;
  ld h = 0;
  for (ld x : c) {
    const ld p = x * x / total;
    if (p > 0) h -= p * std::log(p);
  }
  return static_cast<double>(h);
}

inline double excess_kurtosis(std::span<const double> v) {
  const ld n = static_cast<ld>(v.size());
  ld mu = 0;
  for (double x : v) mu += x;
  mu /= n;
  ld m2 = 0, m4 = 0;
  for (double x : v) {
    const ld c = x - mu;
    m2 += c * c;
    m4 += c * c * c * c;
  }
  m2 /= n;
  m4 /= n;
  return static_cast<double>(m4 / (m2 * m2) - 3);
}

/// Fraction of (positive, negative) pairs ranked correctly, ties counting 1/2.
inline double pairwise_auc(std::span<const double> s, std::span<const int> y) {
  ld wins = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      ++pairs;
      if (s[i] > s[j]) wins += 1;
      else if (s[i] == s[j]) wins += 0.5L;
    }
  }
  return static_cast<double>(wins / pairs);
}

/// Supervised contrastive loss on row vectors z (normalized here), averaged
/// over anchors that have at least one positive.
inline double supcon(const std::vector<std::vector<double>>& z, std::span<const int> y, double tau) {
  const std::size_t n = z.size();
  std::vector<std::vector<ld>> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    ld norm = 0;
    for (double x : z[i]) norm += static_cast<ld>(x) * x;
    norm = std::sqrt(norm);
    for (double x : z[i]) u[i].push_back(x / norm);
  }
  auto dot = [&](std::size_t a, std::size_t b) {
    ld s = 0;
    for (std::size_t k = 0; k < u[a].size(); ++k) s += u[a][k] * u[b][k];
    return s / tau;
  };
  ld total = 0;
  std::size_t anchors = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ld denom = 0;
    std::size_t pos = 0;
    for (std::size_t a = 0; a < n; ++a) {
      if (a == i) continue;
      denom += std::exp(dot(i, a));
      pos += y[a] == y[i];
    }
    if (pos == 0) continue;
    ld li = 0;
    for (std::size_t p = 0; p < n; ++p) {
      if (p == i || y[p] != y[i]) continue;
      li += std::log(std::exp(dot(i, p)) / denom);
    }
    total += -li / static_cast<ld>(pos);
    ++anchors;
  }
  return anchors ? static_cast<double>(total / anchors) : 0.0;
}

inline double rel_err(double a, double b) { return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)}); }

/// Fresh scratch directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("overflow-" + tag + "-" + std::to_string(rd()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

}  // namespace oracle
