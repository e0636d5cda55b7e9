// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "overflow/complexity.hpp"
#include "overflow/features.hpp"
#include "overflow/labeling.hpp"
#include "overflow/probes/config.hpp"
#include "overflow/probes/model.hpp"

namespace overflow {

/// One table cell: where features come from, which probe reads them, and
/// how the folds are drawn.
struct ExperimentConfig {
  Stage stage = Stage::pre_inference;
  FeatureSet feature_set = FeatureSet::representation_joint;
  ProbeConfig probe = ProbeConfig::defaults(Architecture::linear);
  int folds = 5;
  std::uint64_t seed = 7;
  std::string dataset = "unnamed";
  CompressorConfig compressor;
  JudgeMode judge = JudgeMode::manifest;

  /// Canonical JSON (sorted keys, probe seed forced to `seed`).
  std::string to_json() const;
  static ExperimentConfig from_json(std::string_view text);
  std::string digest() const;
};

/// logistic for hand-crafted feature sets, the neural linear probe for
/// representation sets.
ProbeConfig default_probe_config(FeatureSet fs);

struct FoldResult {
  int fold = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t n_test_positive = 0;
  double auc = 0.0;
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
  bool early_stopped = false;
};

struct EvalReport {
  ExperimentConfig config;
  std::string config_digest;
  std::vector<FoldResult> folds;
  double mean_auc = 0.0;
  double std_auc = 0.0;  ///< population std across folds
  std::size_t n = 0;
  std::size_t positives = 0;
  double positive_rate = 0.0;
  std::size_t n_features = 0;
  std::vector<std::string> warnings;

  std::vector<double> fold_aucs() const;
};

/// Stratified k-fold evaluation. For every fold the scaler and probe are fit
/// on the training rows only and the held-out rows are scored. Folds run on
/// up to `jobs` threads; results are ordered by fold index. When `models` is
/// non-null it receives the per-fold models.
EvalReport run_experiment(const Eigen::MatrixXd& x, std::span<const int> y, const ExperimentConfig& cfg,
                          std::size_t jobs = 1, std::vector<ProbeModel>* models = nullptr);

}  // namespace overflow
