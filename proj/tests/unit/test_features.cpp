// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include <fstream>

#include "doctest.h"
#include "oracles.hpp"
#include "overflow/error.hpp"
#include "overflow/features.hpp"
#include "overflow/manifest.hpp"
#include "overflow/saturation.hpp"
#include "overflow/synthetic.hpp"
#include "overflow/tensor_io.hpp"

using namespace overflow;

namespace {

std::vector<InstanceRecord> tiny_world(const oracle::TempDir& tmp, std::size_t n = 12) {
  SynthConfig c = SynthConfig::from_preset("tiny");
  c.n_instances = n;
  return read_manifest(generate_overflow_world(c, tmp.path()).manifest);
}

}  // namespace

TEST_CASE("stage and feature-set table") {
  CHECK(is_valid_combination(Stage::pre_compression, FeatureSet::context));
  CHECK_FALSE(is_valid_combination(Stage::pre_inference, FeatureSet::context));
  CHECK_FALSE(is_valid_combination(Stage::pre_inference, FeatureSet::attention));
  CHECK_THROWS_AS(require_valid_combination(Stage::pre_projection, FeatureSet::saturation_joint), ConfigError);
  CHECK(stage_layers(Stage::pre_inference) == std::vector<std::string_view>{"preproj", "postproj"});
  CHECK(stage_layers(Stage::post_inference) == std::vector<std::string_view>{"mid", "last"});
  CHECK(parse_stage("middle_layer") == Stage::middle_layer);
  CHECK_THROWS_AS(parse_feature_set("everything"), ConfigError);
  for (const auto& sf : kValidCombinations) {
    CHECK(parse_stage(to_string(sf.stage)) == sf.stage);
    CHECK(parse_feature_set(to_string(sf.feature_set)) == sf.feature_set);
  }
}

TEST_CASE("feature widths follow the composition rules") {
  oracle::TempDir tmp("feat");
  const auto rs = tiny_world(tmp, 3);
  const auto& r = rs[0];
  const std::size_t df = 16, dc = 32;  // tiny preset
  CHECK(compose_features(r, Stage::pre_compression, FeatureSet::context).values.size() == 3);
  CHECK(compose_features(r, Stage::pre_inference, FeatureSet::representation).values.size() == df + dc);
  CHECK(compose_features(r, Stage::pre_inference, FeatureSet::representation_joint).values.size() == 2 * (df + dc));
  CHECK(compose_features(r, Stage::last_layer, FeatureSet::representation_joint).values.size() == 2 * dc);
  CHECK(compose_features(r, Stage::middle_layer, FeatureSet::saturation_joint).values.size() == 15);
  CHECK(compose_features(r, Stage::post_inference, FeatureSet::saturation).values.size() == 6);
  CHECK(compose_features(r, Stage::middle_layer, FeatureSet::attention).values.size() == 12);

  const auto fv = compose_features(r, Stage::pre_inference, FeatureSet::representation_joint);
  REQUIRE(fv.blocks.size() == 4);
  CHECK(fv.blocks[0].name == "x_preproj");
  CHECK(fv.blocks[2].name == "q_preproj");
  const auto x = read_tensor(r.rep_paths.at("x_preproj")).to_f64();
  CHECK(fv.values[0] == x[0]);
  CHECK(expand_columns(fv.blocks).at(1) == "x_preproj[1]");

  const auto sat = compose_features(r, Stage::post_projection, FeatureSet::saturation);
  const auto want = saturation_profile(read_tensor(r.rep_paths.at("x_postproj")).to_f64());
  CHECK(sat.values[0] == want.hoyer);
  CHECK(sat.values[1] == want.spectral_entropy);
  CHECK(sat.values[2] == want.excess_kurtosis);
}

TEST_CASE("missing sources name the field") {
  oracle::TempDir tmp("feat");
  auto r = tiny_world(tmp, 1)[0];
  r.rep_paths.erase("q_mid");
  try {
    compose_features(r, Stage::middle_layer, FeatureSet::representation_joint);
    FAIL("expected missing feature");
  } catch (const MissingFeatureError& e) {
    CHECK(e.field() == "rep_paths.q_mid");
  }
  r.attn_path.reset();
  CHECK_THROWS_WITH_AS(compose_features(r, Stage::last_layer, FeatureSet::attention), doctest::Contains("attn_path"),
                       MissingFeatureError);
  r.nonx_paths.clear();
  CHECK_THROWS_WITH_AS(compose_features(r, Stage::last_layer, FeatureSet::saturation_joint),
                       doctest::Contains("nonx_paths.last"), MissingFeatureError);
  CHECK_THROWS_AS(compose_features(r, Stage::pre_inference, FeatureSet::context), ConfigError);
}

TEST_CASE("feature matrix and cache") {
  oracle::TempDir tmp("feat");
  const auto rs = tiny_world(tmp, 12);
  const FeatureMatrix one = build_feature_matrix(rs, Stage::post_inference, FeatureSet::saturation_joint, {}, 1);
  const FeatureMatrix many = build_feature_matrix(rs, Stage::post_inference, FeatureSet::saturation_joint, {}, 3);
  CHECK(one.x.rows() == 12);
  CHECK(one.x.cols() == 30);
  CHECK((one.x.array() == many.x.array()).all());
  CHECK(one.ids == many.ids);
  CHECK(one.columns.size() == 30);

  save_feature_cache(one, tmp / "c.ovt", "abc123");
  std::string digest;
  const FeatureMatrix back = load_feature_cache(tmp / "c.ovt", &digest);
  CHECK(digest == "abc123");
  CHECK(back.stage == Stage::post_inference);
  CHECK(back.feature_set == FeatureSet::saturation_joint);
  CHECK(back.ids == one.ids);
  CHECK(back.columns == one.columns);
  CHECK((back.x.array() == one.x.array()).all());

  auto broken = rs;
  broken[5].perplexity.reset();
  CHECK_THROWS_WITH_AS(build_feature_matrix(broken, Stage::pre_compression, FeatureSet::context, {}, 2),
                       doctest::Contains(broken[5].id.c_str()), MissingFeatureError);
}
