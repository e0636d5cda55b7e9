// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <Eigen/Core>

#include <array>
#include <span>
#include <vector>

#include "overflow/probes/config.hpp"

namespace overflow {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

/// Parameters of every probe architecture. Unused blocks stay empty.
///   linear/logistic: logit = x w1^T + b1                      (w1: 1 x d)
///   mlp:             h = act(x w1^T + b1); logit = h w2^T + b2 (w1: H x d, w2: 1 x H)
///   mlp_scl:         input dropout, then w1, batch norm (gamma, beta), SiLU,
///                    hidden dropout, then w2
/// Vectors are stored as column matrices so every block has one type.
template <typename S>
struct ProbeParams {
  Mat<S> w1, b1;
  Mat<S> gamma, beta;
  Mat<S> w2, b2;
  // Batch-norm running statistics; not trainable.
  Mat<S> running_mean, running_var;

  static constexpr std::size_t kTrainable = 6;

  std::array<Mat<S>*, kTrainable> blocks() { return {&w1, &b1, &gamma, &beta, &w2, &b2}; }
  std::array<const Mat<S>*, kTrainable> blocks() const { return {&w1, &b1, &gamma, &beta, &w2, &b2}; }
  /// Weights enter the L1/L2 penalty; biases and beta do not.
  static constexpr std::array<bool, kTrainable> kRegularized = {true, false, true, false, true, false};
  static constexpr std::array<const char*, kTrainable> kNames = {"w1", "b1", "gamma", "beta", "w2", "b2"};

  std::size_t regularized_count() const;
  std::size_t input_dim() const { return static_cast<std::size_t>(w1.cols()); }
  bool has_hidden() const { return w2.size() > 0; }
  bool has_batch_norm() const { return gamma.size() > 0; }

  /// Same-shaped zero blocks.
  ProbeParams zeros_like() const;

  template <typename T>
  ProbeParams<T> cast() const {
    ProbeParams<T> o;
    o.w1 = w1.template cast<T>();
    o.b1 = b1.template cast<T>();
    o.gamma = gamma.template cast<T>();
    o.beta = beta.template cast<T>();
    o.w2 = w2.template cast<T>();
    o.b2 = b2.template cast<T>();
    o.running_mean = running_mean.template cast<T>();
    o.running_var = running_var.template cast<T>();
    return o;
  }
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases; gamma = 1,
/// beta = 0, running mean 0 and variance 1.
template <typename S>
ProbeParams<S> init_params(const ProbeConfig& cfg, std::size_t input_dim, std::uint64_t seed);

enum class Mode {
  train,     ///< batch-norm uses batch statistics
  inference  ///< batch-norm uses running statistics
};

/// Dropout keep-masks (0/1 entries) for one batch; kept units are scaled by
/// 1 / (1 - dropout). Empty blocks (or a null pointer) mean no dropout.
template <typename S>
struct DropoutMasks {
  Mat<S> input;   ///< B x d
  Mat<S> hidden;  ///< B x H
};

struct ObjectiveParts {
  double bce = 0.0;
  double reg = 0.0;
  double scl = 0.0;
  double total() const { return bce + reg + scl; }
};

/// Full training objective on one batch: mean BCE + L_reg (+ scl_lambda * SCL
/// for mlp_scl). When `grad` is non-null it receives d(total)/d(params).
/// In train mode with batch norm, `batch_mean`/`batch_var` (if non-null)
/// receive the batch statistics used for the running-stat update.
template <typename S>
ObjectiveParts probe_objective(const ProbeParams<S>& params, const Mat<S>& x, std::span<const int> y,
                               const ProbeConfig& cfg, Mode mode, const DropoutMasks<S>* masks,
                               ProbeParams<S>* grad, Mat<S>* batch_mean = nullptr, Mat<S>* batch_var = nullptr);

/// Logits (pre-sigmoid) in inference mode.
template <typename S>
Eigen::Matrix<S, Eigen::Dynamic, 1> probe_logits(const ProbeParams<S>& params, const Mat<S>& x,
                                                 const ProbeConfig& cfg);

}  // namespace overflow
