// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <Eigen/Core>

#include <cstddef>

namespace overflow {

inline constexpr double kStdFloor = 1e-8;

/// Per-feature standardization parameters (population std, floored).
struct Scaler {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
  std::size_t floored = 0;  ///< columns whose std was raised to kStdFloor

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

/// Rows are samples. Requires at least two rows.
Scaler standardize_fit(const Eigen::MatrixXd& x);

}  // namespace overflow
