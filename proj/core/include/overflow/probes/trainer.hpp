// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

#include "overflow/probes/config.hpp"
#include "overflow/probes/network.hpp"

namespace overflow {

struct TrainingTrace {
  std::vector<double> train_loss;  ///< mean objective per epoch
  std::vector<double> val_loss;    ///< validation BCE per epoch
  std::size_t best_epoch = 0;      ///< 1-based
  double best_val_loss = 0.0;
  std::size_t epochs_run = 0;
  bool early_stopped = false;
};

/// Stratified holdout: returns (train, validation) row indices. Each class
/// contributes round(fraction * count) rows to validation, at least one when
/// the class has two or more members.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_holdout(std::span<const int> y,
                                                                                 double fraction,
                                                                                 std::uint64_t seed);

/// Trains a linear / mlp / mlp_scl probe with Adam on standardized X.
/// Early stopping monitors validation BCE on a stratified holdout and
/// restores the best epoch's weights. Throws SingleClassError when y has one
/// class and TrainingError on a non-finite loss.
ProbeParams<double> train_probe(const Eigen::MatrixXd& x, std::span<const int> y, const ProbeConfig& cfg,
                                TrainingTrace* trace = nullptr);

}  // namespace overflow
