// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <span>
#include <string>

#include "overflow/probes/config.hpp"
#include "overflow/probes/network.hpp"
#include "overflow/probes/scaler.hpp"
#include "overflow/probes/trainer.hpp"

namespace overflow {

inline constexpr int kModelFormatVersion = 1;

/// A trained classifier together with the standardization fitted on its
/// training rows.
struct ProbeModel {
  ProbeConfig config;
  ProbeParams<double> params;
  Scaler scaler;
  std::string config_digest;
  std::string monitored_metric = "val_bce";
  TrainingTrace trace;

  std::size_t input_dim() const { return params.input_dim(); }
};

/// Fits the scaler on `x` (raw features), then trains the configured
/// architecture on the standardized rows.
ProbeModel fit_probe(const Eigen::MatrixXd& x, std::span<const int> y, const ProbeConfig& cfg);

/// sigmoid(logit) in inference mode after applying the stored scaler.
/// Throws DomainError on a column-count mismatch.
Eigen::VectorXd predict_scores(const ProbeModel& model, const Eigen::MatrixXd& x);

/// Writes `dir/model.json` plus one OVT file per parameter block.
void save_model(const ProbeModel& model, const std::filesystem::path& dir);
ProbeModel load_model(const std::filesystem::path& dir);

}  // namespace overflow
