// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "overflow/probes/scl.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "overflow/error.hpp"

namespace overflow {

template <typename S>
S scl_loss(const Mat<S>& z, std::span<const int> labels, S tau, Mat<S>* grad) {
  const Eigen::Index n = z.rows();
  if (n < 2) throw DomainError("scl_loss: batch needs at least 2 rows");
  if (!(tau > S(0))) throw DomainError("scl_loss: temperature must be > 0");
  if (static_cast<Eigen::Index>(labels.size()) != n) throw DomainError("scl_loss: label count mismatch");

  constexpr S kNormEps = S(1e-12);
  Eigen::Matrix<S, Eigen::Dynamic, 1> norms = z.rowwise().norm();
  for (Eigen::Index i = 0; i < n; ++i) norms(i) = std::max(norms(i), kNormEps);
  const Mat<S> zn = z.array().colwise() / norms.array();
  const Mat<S> sim = (zn * zn.transpose()) / tau;

  // dL/dsim accumulated per anchor; normalized by the anchor count at the end.
  Mat<S> g = Mat<S>::Zero(n, n);
  S total = 0;
  Eigen::Index anchors = 0;
  std::vector<S> soft(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index n_pos = 0;
    for (Eigen::Index a = 0; a < n; ++a) {
      if (a != i && labels[static_cast<std::size_t>(a)] == labels[static_cast<std::size_t>(i)]) ++n_pos;
    }
    if (n_pos == 0) continue;
    ++anchors;

    S mx = -std::numeric_limits<S>::infinity();
    for (Eigen::Index a = 0; a < n; ++a) {
      if (a != i) mx = std::max(mx, sim(i, a));
    }
    S denom = 0;
    for (Eigen::Index a = 0; a < n; ++a) {
      if (a != i) denom += std::exp(sim(i, a) - mx);
    }
    const S lse = mx + std::log(denom);

    S pos_sum = 0;
    for (Eigen::Index a = 0; a < n; ++a) {
      if (a == i) continue;
      const bool pos = labels[static_cast<std::size_t>(a)] == labels[static_cast<std::size_t>(i)];
      if (pos) pos_sum += sim(i, a);
      g(i, a) = std::exp(sim(i, a) - lse) - (pos ? S(1) / static_cast<S>(n_pos) : S(0));
    }
    total += lse - pos_sum / static_cast<S>(n_pos);
  }
  if (anchors == 0) {
    if (grad) *grad = Mat<S>::Zero(n, z.cols());
    return S(0);
  }
  const S inv_anchors = S(1) / static_cast<S>(anchors);

  if (grad) {
    g *= inv_anchors;
    const Mat<S> dzn = ((g + g.transpose()) * zn) / tau;
    grad->resize(n, z.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
      const S dot = zn.row(i).dot(dzn.row(i));
      if (z.row(i).norm() > kNormEps) {
        grad->row(i) = (dzn.row(i) - dot * zn.row(i)) / norms(i);
      } else {
        grad->row(i) = dzn.row(i) / kNormEps;
      }
    }
  }
  return total * inv_anchors;
}

template float scl_loss<float>(const Mat<float>&, std::span<const int>, float, Mat<float>*);
template double scl_loss<double>(const Mat<double>&, std::span<const int>, double, Mat<double>*);

}  // namespace overflow
