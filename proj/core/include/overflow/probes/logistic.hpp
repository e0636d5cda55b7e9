// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <Eigen/Core>

#include <span>

#include "overflow/probes/config.hpp"
#include "overflow/probes/network.hpp"

namespace overflow {

/// 0.5 ||w||^2 + C sum_i log-loss(x_i . w + b, y_i); the bias is unpenalized.
/// Gradient written to grad_w / grad_b when non-null.
double logistic_objective(const Eigen::VectorXd& w, double b, const Eigen::MatrixXd& x, std::span<const int> y,
                          double c, Eigen::VectorXd* grad_w = nullptr, double* grad_b = nullptr);

struct LogisticFit {
  ProbeParams<double> params;
  std::size_t iterations = 0;
  double grad_inf_norm = 0.0;
  bool converged = false;
};

/// Damped Newton on the objective above. Converged when the gradient's
/// infinity norm drops below cfg.logistic_tol; stops after
/// cfg.logistic_max_iter iterations otherwise. X must be standardized.
LogisticFit train_logistic(const Eigen::MatrixXd& x, std::span<const int> y, const ProbeConfig& cfg);

}  // namespace overflow
