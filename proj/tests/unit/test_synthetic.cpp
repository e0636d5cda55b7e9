// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include <cmath>
#include <fstream>
#include <iterator>

#include "doctest.h"
#include "oracles.hpp"
#include "overflow/error.hpp"
#include "overflow/labeling.hpp"
#include "overflow/manifest.hpp"
#include "overflow/saturation.hpp"
#include "overflow/synthetic.hpp"
#include "overflow/tensor_io.hpp"

using namespace overflow;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

}  // namespace

TEST_CASE("synthetic: analytic overflow rate") {
  SynthConfig c;
  // m uniform on 1..8, capacity 4: P(target > 4) = sum_{m=5..8} (m-4)/m / 8.
  const double want = (1.0 / 5 + 2.0 / 6 + 3.0 / 7 + 4.0 / 8) / 8.0;
  CHECK(analytic_overflow_rate(c) == doctest::Approx(want).epsilon(1e-12));
  c.m_max = 4;
  CHECK(analytic_overflow_rate(c) == 0.0);
}

TEST_CASE("synthetic: overflow rate of the paper-mini world") {
  const SynthConfig c = SynthConfig::from_preset("paper-mini");
  std::size_t pos = 0;
  for (std::size_t i = 0; i < c.n_instances; ++i) {
    const SynthInstance s = generate_instance(c, i);
    CHECK((s.target >= 1 && s.target <= s.m));
    pos += static_cast<std::size_t>(s.target > c.capacity);
    CHECK(*s.record.ref_correct);
    CHECK(*s.record.comp_correct == (s.target <= c.capacity));
  }
  const double rate = static_cast<double>(pos) / static_cast<double>(c.n_instances);
  INFO("empirical ", rate, " analytic ", analytic_overflow_rate(c));
  CHECK(std::abs(rate - analytic_overflow_rate(c)) <= 0.02);
}

TEST_CASE("synthetic: no overflow when capacity is never exceeded") {
  oracle::TempDir tmp("syn");
  SynthConfig c = SynthConfig::from_preset("tiny");
  c.m_max = c.capacity;
  const auto s = generate_overflow_world(c, tmp.path());
  CHECK(s.positives == 0);
  const auto ds = build_dataset(read_manifest(s.manifest), {});
  CHECK(ds.counts.positives == 0);
  CHECK(ds.counts.single_class());
}

TEST_CASE("synthetic: files are bitwise reproducible across runs and thread counts") {
  oracle::TempDir a("syn"), b("syn");
  SynthConfig c = SynthConfig::from_preset("tiny");
  c.n_instances = 40;
  generate_overflow_world(c, a.path(), 1);
  generate_overflow_world(c, b.path(), 3);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a.path())) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), a.path());
    CHECK(slurp(e.path()) == slurp(b.path() / rel));
    ++files;
  }
  CHECK(files > 40 * 8);

  // Earlier instances do not depend on how many are generated.
  SynthConfig longer = c;
  longer.n_instances = 80;
  const auto i5 = generate_instance(c, 5);
  const auto j5 = generate_instance(longer, 5);
  CHECK(i5.vectors == j5.vectors);
}

TEST_CASE("synthetic: manifest passes tensor validation") {
  oracle::TempDir tmp("syn");
  SynthConfig c = SynthConfig::from_preset("tiny");
  c.n_instances = 10;
  const auto rs = read_manifest(generate_overflow_world(c, tmp.path()).manifest);
  REQUIRE(rs.size() == 10);
  for (const auto& r : rs) {
    validate_record_tensors(r);
    CHECK(r.rep_paths.size() == 8);
    CHECK(read_tensor(r.rep_paths.at("x_preproj")).size() == c.fact_dim);
    CHECK(read_tensor(r.rep_paths.at("q_last")).size() == c.compressed_dim);
  }
  SynthConfig bad = c;
  bad.label_noise = 0.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(SynthConfig::from_preset("huge"), ConfigError);
}

TEST_CASE("token-type corpus: dense vectors look like noise, sparse ones do not") {
  TokenCorpusConfig tc;
  tc.per_class = 200;
  tc.dim = 512;
  const TokenCorpus a = generate_token_type_corpus(tc);
  const TokenCorpus b = generate_token_type_corpus(tc);
  CHECK((a.vectors.array() == b.vectors.array()).all());
  CHECK(a.labels == b.labels);
  double se[2] = {0, 0}, ho[2] = {0, 0}, ku[2] = {0, 0};
  for (Eigen::Index i = 0; i < a.vectors.rows(); ++i) {
    std::vector<double> v(a.vectors.row(i).data(), a.vectors.row(i).data() + a.vectors.cols());
    const auto p = saturation_profile(v);
    const int y = a.labels[static_cast<std::size_t>(i)];
    se[y] += p.spectral_entropy / static_cast<double>(tc.per_class);
    ho[y] += p.hoyer / static_cast<double>(tc.per_class);
    ku[y] += p.excess_kurtosis / static_cast<double>(tc.per_class);
  }
  CHECK(ho[0] > ho[1] + 0.3);
  CHECK(ku[0] > ku[1] + 5.0);
  // Both spectra are near-white: random support spreads a sparse vector over
  // every DCT frequency. Dense class sits at ln d - (digamma(3/2) + ln 2).
  const double e_xlogx = 2.0 - 2.0 * std::log(2.0) - 0.5772156649015329 + std::log(2.0);
  CHECK(std::abs(se[1] - (std::log(512.0) - e_xlogx)) < 0.02);
  CHECK(std::abs(se[0] - se[1]) < 0.1);
}
