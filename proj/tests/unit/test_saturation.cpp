// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "overflow/dct.hpp"
#include "overflow/error.hpp"
#include "overflow/saturation.hpp"

using namespace overflow;
using V = std::vector<double>;

TEST_CASE("hoyer: hand values") {
  CHECK(hoyer(V{1, 1, 1, 1}) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(hoyer(V{0, 0, 5, 0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(hoyer(V{3, 4, 0, 0}) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK_THROWS_AS(hoyer(V{0, 0, 0}), DomainError);
  CHECK_THROWS_AS(hoyer(V{1}), DomainError);
}

TEST_CASE("spectral entropy: hand values and oracle") {
  CHECK(spectral_entropy(V{2.5, 2.5, 2.5, 2.5, 2.5}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(spectral_entropy(V{-3.0}) == 0.0);
  CHECK_THROWS_AS(spectral_entropy(V{0, 0}), DomainError);

  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  V v(8);
  for (auto& x : v) x = g(rng);
  CHECK(std::abs(spectral_entropy(v) - oracle::spectral_entropy(v)) < 1e-10);
}

TEST_CASE("excess kurtosis: hand values") {
  CHECK(excess_kurtosis(V{-1, 1, -1, 1}) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(excess_kurtosis(V{0, 0, 0, 6, 0, 0}) == doctest::Approx(1.2).epsilon(1e-13));
  CHECK_THROWS_AS(excess_kurtosis(V{5, 5, 5, 5}), DomainError);
}

TEST_CASE("saturation profile of a one-hot vector") {
  const V v{0, 0, 5, 0};
  const auto p = saturation_profile(v);
  CHECK(p.hoyer == doctest::Approx(1.0));
  CHECK(std::abs(p.spectral_entropy - oracle::spectral_entropy(v)) < 1e-12);
  CHECK(std::abs(p.excess_kurtosis - oracle::excess_kurtosis(v)) < 1e-12);
  CHECK_THROWS_AS(saturation_profile(V{2, 2, 2}), DomainError);
}

TEST_CASE("saturation profile of a Gaussian sample, d = 4096") {
  std::mt19937_64 rng(4096);
  std::normal_distribution<double> g;
  V v(4096);
  for (auto& x : v) x = g(rng);
  const auto p = saturation_profile(v);
  CHECK(p.hoyer < 0.3);
  // Orthonormal DCT of white noise is white noise, so the normalized energies
  // are chi-square(1) / d and H ~ ln d - E[X ln X] = ln d - (digamma(3/2) + ln 2).
  const double e_xlogx = 2.0 - 2.0 * std::log(2.0) - 0.5772156649015329 + std::log(2.0);
  CHECK(std::abs(p.spectral_entropy - (std::log(4096.0) - e_xlogx)) < 0.05);
  CHECK(p.spectral_entropy > 0.9 * std::log(4096.0));
  CHECK(std::abs(p.excess_kurtosis) < 0.5);
}

TEST_CASE("aggregation over profiles") {
  const SaturationStats a{0.2, 1.0, 0.5};
  const SaturationStats b{0.6, 3.0, -0.5};
  const std::vector<SaturationStats> one{a};
  const auto s1 = aggregate_saturation(one);
  CHECK(s1.hoyer.mean == 0.2);
  CHECK(s1.hoyer.max == 0.2);
  CHECK(s1.hoyer.min == 0.2);
  CHECK(s1.hoyer.std == 0.0);

  const std::vector<SaturationStats> two{a, b};
  const auto s2 = aggregate_saturation(two);
  CHECK(s2.hoyer.mean == doctest::Approx(0.4));
  CHECK(s2.hoyer.std == doctest::Approx(0.2));
  CHECK(s2.spectral_entropy.mean == doctest::Approx(2.0));
  const auto arr = s2.as_array();
  CHECK(arr[0] == doctest::Approx(0.4));
  CHECK(arr[1] == doctest::Approx(0.6));
  CHECK(arr[2] == doctest::Approx(0.2));
  CHECK(arr[3] == doctest::Approx(0.2));
  CHECK(arr[8] == doctest::Approx(0.0));

  CHECK_THROWS_AS(aggregate_saturation(std::vector<SaturationStats>{}), DomainError);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<SaturationStats> many(17);
  for (auto& p : many) p = {u(rng), u(rng), u(rng)};
  const auto agg = aggregate_saturation(many);
  for (const Summary* s : {&agg.hoyer, &agg.spectral_entropy, &agg.excess_kurtosis}) {
    CHECK(s->min <= s->mean);
    CHECK(s->mean <= s->max);
  }
}

TEST_CASE("dct: FFT path matches the defining sum and preserves energy") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (std::size_t d : {1u, 2u, 3u, 8u, 31u, 64u, 257u, 1000u}) {
    V v(d);
    for (auto& x : v) x = g(rng);
    const V c = dct2(v);
    const auto ref = oracle::dct(v);
    double e_in = 0, e_out = 0;
    for (std::size_t k = 0; k < d; ++k) {
      CHECK(std::abs(c[k] - static_cast<double>(ref[k])) < 1e-10);
      e_in += v[k] * v[k];
      e_out += c[k] * c[k];
    }
    CHECK(std::abs(e_in - e_out) <= 1e-9 * e_in);
    const V naive = dct2_naive(v);
    for (std::size_t k = 0; k < d; ++k) CHECK(std::abs(naive[k] - c[k]) < 1e-10);
  }
}
