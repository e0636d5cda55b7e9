// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "overflow/probes/logistic.hpp"

#include <Eigen/Cholesky>

#include <cmath>

#include "overflow/error.hpp"

namespace overflow {

namespace {

double sigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

double softplus(double v) { return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v))); }

}  // namespace

double logistic_objective(const Eigen::VectorXd& w, double b, const Eigen::MatrixXd& x, std::span<const int> y,
                          double c, Eigen::VectorXd* grad_w, double* grad_b) {
  if (static_cast<Eigen::Index>(y.size()) != x.rows()) throw DomainError("logistic_objective: label count mismatch");
  if (w.size() != x.cols()) throw DomainError("logistic_objective: weight width mismatch");
  const Eigen::VectorXd logits = (x * w).array() + b;
  double loss = 0.0;
  Eigen::VectorXd resid(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double yi = y[static_cast<std::size_t>(i)];
    loss += softplus(logits(i)) - yi * logits(i);
    resid(i) = sigmoid(logits(i)) - yi;
  }
  if (grad_w) *grad_w = w + c * (x.transpose() * resid);
  if (grad_b) *grad_b = c * resid.sum();
  return 0.5 * w.squaredNorm() + c * loss;
}

LogisticFit train_logistic(const Eigen::MatrixXd& x, std::span<const int> y, const ProbeConfig& cfg) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (n == 0 || d == 0) throw DomainError("train_logistic: empty design matrix");
  bool has0 = false, has1 = false;
  for (int v : y) (v ? has1 : has0) = true;
  if (!(has0 && has1)) throw SingleClassError("train_logistic: labels contain a single class");

  const double c = cfg.logistic_c;
  // Parameters stacked as theta = [w; b].
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
  Eigen::MatrixXd xa(n, d + 1);
  xa.leftCols(d) = x;
  xa.col(d).setOnes();

  auto objective = [&](const Eigen::VectorXd& t, Eigen::VectorXd* g) {
    Eigen::VectorXd gw;
    double gb = 0.0;
    const double f = logistic_objective(t.head(d), t(d), x, y, c, g ? &gw : nullptr, g ? &gb : nullptr);
    if (g) {
      g->resize(d + 1);
      g->head(d) = gw;
      (*g)(d) = gb;
    }
    return f;
  };

  LogisticFit fit;
  Eigen::VectorXd grad;
  double f = objective(theta, &grad);
  for (std::size_t it = 0; it < cfg.logistic_max_iter; ++it) {
    fit.grad_inf_norm = grad.lpNorm<Eigen::Infinity>();
    if (fit.grad_inf_norm < cfg.logistic_tol) {
      fit.converged = true;
      break;
    }
    const Eigen::VectorXd logits = xa * theta;
    Eigen::VectorXd dw(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = sigmoid(logits(i));
      dw(i) = p * (1.0 - p);
    }
    Eigen::MatrixXd hess = c * (xa.transpose() * dw.asDiagonal() * xa);
    hess.diagonal().head(d).array() += 1.0;
    // The bias curvature can vanish when every prediction saturates.
    hess(d, d) += 1e-12;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    Eigen::VectorXd step = -ldlt.solve(grad);
    if (ldlt.info() != Eigen::Success || !step.allFinite()) step = -grad;

    const double slope = grad.dot(step);
    double alpha = 1.0;
    Eigen::VectorXd next;
    double f_next = f;
    for (int ls = 0; ls < 60; ++ls) {
      next = theta + alpha * step;
      f_next = objective(next, nullptr);
      if (f_next <= f + 1e-4 * alpha * slope) break;
      alpha *= 0.5;
    }
    theta = next;
    f = objective(theta, &grad);
    fit.iterations = it + 1;
  }
  if (!fit.converged) {
    fit.grad_inf_norm = grad.lpNorm<Eigen::Infinity>();
    fit.converged = fit.grad_inf_norm < cfg.logistic_tol;
  }
  if (!std::isfinite(f)) throw TrainingError("train_logistic: objective became non-finite");

  fit.params.w1 = theta.head(d).transpose();
  fit.params.b1 = Eigen::MatrixXd::Constant(1, 1, theta(d));
  return fit;
}

}  // namespace overflow
