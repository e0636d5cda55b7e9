// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include <random>

#include "doctest.h"
#include "overflow/complexity.hpp"
#include "overflow/error.hpp"

using namespace overflow;

// Raw DEFLATE (wbits -15) of 1000 x 'a' at level 6, measured with an
// independent zlib binding when the fixture was recorded.
constexpr std::size_t kRunOfA = 11;

TEST_CASE("compressibility: pinned fixture and thresholds") {
  const std::string as(1000, 'a');
  CHECK(deflate_size(as, 6) == kRunOfA);
  CHECK(compressibility(as) == doctest::Approx(1000.0 / kRunOfA));
  CHECK(compressibility(as) > 10.0);

  std::mt19937_64 rng(1000);
  std::uniform_int_distribution<int> byte(0, 255);
  std::string noise(1000, '\0');
  for (auto& c : noise) c = static_cast<char>(byte(rng));
  CHECK(compressibility(noise) < 1.1);

  CHECK_THROWS_AS(compressibility(""), DomainError);
  CHECK_THROWS_AS(compressibility(as, CompressorConfig{"lzma", 6}), ConfigError);
}

TEST_CASE("context complexity passes counts through") {
  InstanceRecord r;
  r.id = "r1";
  r.context = "the cat sat on the mat and the cat sat again";
  r.token_count = 120;
  r.perplexity = 8.4;
  const auto f = context_complexity(r);
  CHECK(f.n_ctx == 120);
  CHECK(f.ppl == 8.4);
  CHECK(f.compress_ratio == doctest::Approx(compressibility(r.context)));
  CHECK_FALSE(f.token_count_fallback);
}

TEST_CASE("context complexity never imputes silently") {
  InstanceRecord r;
  r.id = "r2";
  r.context = "a  b\tc\n d";
  r.perplexity = 2.0;
  CHECK_THROWS_WITH_AS(context_complexity(r), doctest::Contains("token_count"), MissingFeatureError);

  ComplexityOptions o;
  o.allow_whitespace_token_fallback = true;
  const auto f = context_complexity(r, o);
  CHECK(f.n_ctx == 4);
  CHECK(f.token_count_fallback);
  CHECK(whitespace_token_count("") == 0);

  r.token_count = 3;
  r.perplexity.reset();
  try {
    context_complexity(r);
    FAIL("expected a missing-feature error");
  } catch (const MissingFeatureError& e) {
    CHECK(e.field() == "perplexity");
    CHECK(e.instance_id() == "r2");
  }

  r.perplexity = 2.0;
  r.context.clear();
  CHECK_THROWS_AS(context_complexity(r), DomainError);
}
