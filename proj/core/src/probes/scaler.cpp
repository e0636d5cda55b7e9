// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "overflow/probes/scaler.hpp"

#include <cmath>

#include "overflow/error.hpp"

namespace overflow {

Scaler standardize_fit(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) throw DomainError("standardize_fit needs at least 2 rows");
  Scaler s;
  s.mean = x.colwise().mean().transpose();
  s.std.resize(x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double var = (x.col(c).array() - s.mean(c)).square().mean();
    double sd = std::sqrt(var);
    if (!(sd >= kStdFloor)) {
      sd = kStdFloor;
      ++s.floored;
    }
    s.std(c) = sd;
  }
  return s;
}

Eigen::MatrixXd Scaler::apply(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean.size()) {
    throw DomainError("scaler expects " + std::to_string(mean.size()) + " columns, got " + std::to_string(x.cols()));
  }
  return (x.rowwise() - mean.transpose()).array().rowwise() / std.transpose().array();
}

}  // namespace overflow
