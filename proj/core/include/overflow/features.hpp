// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <Eigen/Core>

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "overflow/complexity.hpp"
#include "overflow/manifest.hpp"

namespace overflow {

enum class Stage {
  pre_compression,
  pre_inference,   ///< preproj + postproj
  post_inference,  ///< mid + last
  pre_projection,
  post_projection,
  middle_layer,
  last_layer,
};

enum class FeatureSet { context, saturation, saturation_joint, attention, representation, representation_joint };

Stage parse_stage(std::string_view s);
FeatureSet parse_feature_set(std::string_view s);
std::string_view to_string(Stage s);
std::string_view to_string(FeatureSet f);

struct StageFeature {
  Stage stage;
  FeatureSet feature_set;
};

/// Every supported (stage, feature set) pair, in table order.
inline constexpr std::array<StageFeature, 25> kValidCombinations = {{
    {Stage::pre_compression, FeatureSet::context},
    {Stage::pre_inference, FeatureSet::representation},
    {Stage::pre_inference, FeatureSet::representation_joint},
    {Stage::pre_inference, FeatureSet::saturation},
    {Stage::post_inference, FeatureSet::attention},
    {Stage::post_inference, FeatureSet::representation},
    {Stage::post_inference, FeatureSet::representation_joint},
    {Stage::post_inference, FeatureSet::saturation},
    {Stage::post_inference, FeatureSet::saturation_joint},
    {Stage::pre_projection, FeatureSet::representation},
    {Stage::pre_projection, FeatureSet::representation_joint},
    {Stage::pre_projection, FeatureSet::saturation},
    {Stage::post_projection, FeatureSet::representation},
    {Stage::post_projection, FeatureSet::representation_joint},
    {Stage::post_projection, FeatureSet::saturation},
    {Stage::middle_layer, FeatureSet::attention},
    {Stage::middle_layer, FeatureSet::representation},
    {Stage::middle_layer, FeatureSet::representation_joint},
    {Stage::middle_layer, FeatureSet::saturation},
    {Stage::middle_layer, FeatureSet::saturation_joint},
    {Stage::last_layer, FeatureSet::attention},
    {Stage::last_layer, FeatureSet::representation},
    {Stage::last_layer, FeatureSet::representation_joint},
    {Stage::last_layer, FeatureSet::saturation},
    {Stage::last_layer, FeatureSet::saturation_joint},
}};

bool is_valid_combination(Stage stage, FeatureSet fs);
/// Throws ConfigError naming the pair when it is not supported.
void require_valid_combination(Stage stage, FeatureSet fs);

/// Layer keys (preproj, postproj, mid, last) a stage draws from.
std::vector<std::string_view> stage_layers(Stage stage);

/// Hand-crafted sets default to logistic regression, representation sets to
/// the neural linear probe.
bool is_representation_set(FeatureSet fs);

/// A named run of consecutive columns.
struct FeatureBlock {
  std::string name;
  std::size_t width = 1;
  friend bool operator==(const FeatureBlock&, const FeatureBlock&) = default;
};

/// Column names; blocks wider than one expand to name[i].
std::vector<std::string> expand_columns(const std::vector<FeatureBlock>& blocks);

struct FeatureOptions {
  ComplexityOptions complexity;
};

struct FeatureVector {
  std::vector<double> values;
  std::vector<FeatureBlock> blocks;
  bool token_count_fallback = false;
  std::size_t ratio_capped = 0;
  std::size_t rows_off_simplex = 0;
};

/// Features of one instance. Missing sources raise MissingFeatureError with
/// the instance id and the field name.
FeatureVector compose_features(const InstanceRecord& record, Stage stage, FeatureSet fs,
                               const FeatureOptions& opts = {});

struct FeatureMatrix {
  Stage stage = Stage::pre_compression;
  FeatureSet feature_set = FeatureSet::context;
  Eigen::MatrixXd x;  ///< rows follow `ids`
  std::vector<std::string> ids;
  std::vector<std::string> columns;
  std::size_t token_count_fallbacks = 0;
  std::size_t ratio_capped = 0;
  std::size_t rows_off_simplex = 0;
};

/// Composes every record (in manifest order) on up to `jobs` threads. The
/// first failing record in manifest order determines the thrown error.
FeatureMatrix build_feature_matrix(const std::vector<InstanceRecord>& records, Stage stage, FeatureSet fs,
                                   const FeatureOptions& opts = {}, std::size_t jobs = 1);

/// Feature cache: an f64 OVT matrix at `path` plus `path` + ".json" holding
/// columns, ids, stage, feature set and the producing config digest.
void save_feature_cache(const FeatureMatrix& fm, const std::filesystem::path& path, const std::string& digest);
FeatureMatrix load_feature_cache(const std::filesystem::path& path, std::string* digest = nullptr);

}  // namespace overflow
