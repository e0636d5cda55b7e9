// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace overflow {

enum class Architecture { logistic, linear, mlp, mlp_scl };
enum class Activation { relu, silu };

Architecture parse_architecture(std::string_view s);
std::string_view to_string(Architecture a);
std::string_view to_string(Activation a);

/// Training recipe for every probe. `defaults()` returns the pinned values;
/// anything else is an explicit override.
struct ProbeConfig {
  Architecture architecture = Architecture::linear;

  // Network shape (mlp, mlp_scl).
  std::size_t hidden_dim = 1024;
  Activation activation = Activation::relu;
  double dropout = 0.0;  ///< applied to the input and to the hidden layer
  bool batch_norm = false;

  // Optimization.
  double learning_rate = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t batch_size = 256;
  std::size_t max_epochs = 150;
  std::size_t patience = 20;
  double validation_fraction = 0.2;

  // L_reg = lambda_l2 / (2N) ||theta||_2^2 + lambda_l1 / N ||theta||_1, N = #non-bias parameters.
  double lambda_l2 = 500.0;
  double lambda_l1 = 100.0;

  // Supervised contrastive term (mlp_scl).
  double scl_lambda = 0.0;
  double temperature = 0.07;

  double bn_momentum = 0.1;
  double bn_eps = 1e-5;

  // Feature-based logistic regression: 0.5||w||^2 + C sum log-loss.
  double logistic_c = 1e-5;
  std::size_t logistic_max_iter = 1000;
  double logistic_tol = 1e-6;

  std::uint64_t seed = 7;

  static ProbeConfig defaults(Architecture arch);

  /// Throws ConfigError on non-positive sizes/rates or out-of-range fractions.
  void validate() const;

  /// Deterministic JSON (sorted keys); the basis of the config digest.
  std::string to_json() const;
  static ProbeConfig from_json(std::string_view text);
};

}  // namespace overflow
