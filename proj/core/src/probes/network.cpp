// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "overflow/probes/network.hpp"

#include <cmath>
#include <random>

#include "overflow/error.hpp"
#include "overflow/probes/scl.hpp"
#include "overflow/rng.hpp"

namespace overflow {

template <typename S>
std::size_t ProbeParams<S>::regularized_count() const {
  std::size_t n = 0;
  const auto bs = blocks();
  for (std::size_t i = 0; i < kTrainable; ++i) {
    if (kRegularized[i]) n += static_cast<std::size_t>(bs[i]->size());
  }
  return n;
}

template <typename S>
ProbeParams<S> ProbeParams<S>::zeros_like() const {
  ProbeParams o;
  auto dst = o.blocks();
  const auto src = blocks();
  for (std::size_t i = 0; i < kTrainable; ++i) *dst[i] = Mat<S>::Zero(src[i]->rows(), src[i]->cols());
  return o;
}

template <typename S>
ProbeParams<S> init_params(const ProbeConfig& cfg, std::size_t input_dim, std::uint64_t seed) {
  if (input_dim == 0) throw DomainError("probe input dimension must be >= 1");
  Rng rng = make_rng(seed, streams::kProbeInit, 0);
  auto uniform = [&rng](Eigen::Index rows, Eigen::Index cols, double fan_in) {
    const double bound = 1.0 / std::sqrt(fan_in);
    std::uniform_real_distribution<double> dist(-bound, bound);
    Mat<S> m(rows, cols);
    // Column-major fill; draws are taken in double so float and double
    // parameter sets start from the same values.
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = static_cast<S>(dist(rng));
    }
    return m;
  };
  const auto d = static_cast<Eigen::Index>(input_dim);
  ProbeParams<S> p;
  if (cfg.architecture == Architecture::linear || cfg.architecture == Architecture::logistic) {
    p.w1 = uniform(1, d, static_cast<double>(d));
    p.b1 = uniform(1, 1, static_cast<double>(d));
    return p;
  }
  const auto h = static_cast<Eigen::Index>(cfg.hidden_dim);
  p.w1 = uniform(h, d, static_cast<double>(d));
  p.b1 = uniform(h, 1, static_cast<double>(d));
  if (cfg.batch_norm) {
    p.gamma = Mat<S>::Ones(h, 1);
    p.beta = Mat<S>::Zero(h, 1);
    p.running_mean = Mat<S>::Zero(h, 1);
    p.running_var = Mat<S>::Ones(h, 1);
  }
  p.w2 = uniform(1, h, static_cast<double>(h));
  p.b2 = uniform(1, 1, static_cast<double>(h));
  return p;
}

namespace {

template <typename S>
S softplus(S v) {
  return std::max(v, S(0)) + std::log1p(std::exp(-std::abs(v)));
}

template <typename S>
S sigmoid(S v) {
  if (v >= S(0)) return S(1) / (S(1) + std::exp(-v));
  const S e = std::exp(v);
  return e / (S(1) + e);
}

template <typename S>
using Arr = Eigen::Array<S, Eigen::Dynamic, Eigen::Dynamic>;

// Parameter vectors are stored as H x 1 matrices; broadcasting needs a
// compile-time row type.
template <typename S>
Eigen::Array<S, 1, Eigen::Dynamic> as_row(const Mat<S>& col) {
  return col.transpose().array();
}

}  // namespace

template <typename S>
ObjectiveParts probe_objective(const ProbeParams<S>& params, const Mat<S>& x, std::span<const int> y,
                               const ProbeConfig& cfg, Mode mode, const DropoutMasks<S>* masks,
                               ProbeParams<S>* grad, Mat<S>* batch_mean, Mat<S>* batch_var) {
  const Eigen::Index b = x.rows();
  if (b == 0) throw DomainError("probe_objective: empty batch");
  if (static_cast<Eigen::Index>(y.size()) != b) throw DomainError("probe_objective: label count mismatch");
  if (x.cols() != params.w1.cols()) throw DomainError("probe_objective: input width mismatch");

  const S keep_scale = cfg.dropout > 0.0 ? static_cast<S>(1.0 / (1.0 - cfg.dropout)) : S(1);
  const bool drop_in = masks && masks->input.size() > 0;
  const bool drop_hidden = masks && masks->hidden.size() > 0;

  Mat<S> x_dropped;
  if (drop_in) x_dropped = (x.array() * masks->input.array() * keep_scale).matrix();
  const Mat<S>& xin = drop_in ? x_dropped : x;

  const bool hidden = params.has_hidden();
  const bool bn = params.has_batch_norm();
  const bool bn_batch = bn && mode == Mode::train;
  const S eps = static_cast<S>(cfg.bn_eps);

  Eigen::Matrix<S, Eigen::Dynamic, 1> logits;
  Mat<S> z, zhat, hpre, h, hd;
  Eigen::Array<S, 1, Eigen::Dynamic> inv_std;
  if (!hidden) {
    logits = xin * params.w1.transpose();
    logits.array() += params.b1(0, 0);
  } else {
    z = xin * params.w1.transpose();
    z.rowwise() += as_row(params.b1).matrix();
    if (bn) {
      Eigen::Array<S, 1, Eigen::Dynamic> mu, var;
      if (bn_batch) {
        mu = z.colwise().mean().array();
        var = (z.array().rowwise() - mu).square().colwise().mean();
        if (batch_mean) *batch_mean = mu.matrix().transpose();
        if (batch_var) *batch_var = var.matrix().transpose();
      } else {
        mu = as_row(params.running_mean);
        var = as_row(params.running_var);
      }
      inv_std = (var + eps).rsqrt();
      zhat = ((z.array().rowwise() - mu).rowwise() * inv_std).matrix();
      hpre = ((zhat.array().rowwise() * as_row(params.gamma)).rowwise() + as_row(params.beta)).matrix();
    } else {
      hpre = z;
    }
    if (cfg.activation == Activation::relu) {
      h = hpre.cwiseMax(S(0));
    } else {
      h = hpre.unaryExpr([](S v) { return v * sigmoid(v); });
    }
    if (drop_hidden) {
      hd = (h.array() * masks->hidden.array() * keep_scale).matrix();
    } else {
      hd = h;
    }
    logits = hd * params.w2.transpose();
    logits.array() += params.b2(0, 0);
  }

  ObjectiveParts parts;
  Eigen::Matrix<S, Eigen::Dynamic, 1> dlogit(b);
  double bce = 0.0;
  for (Eigen::Index i = 0; i < b; ++i) {
    const S l = logits(i);
    const S yi = static_cast<S>(y[static_cast<std::size_t>(i)]);
    bce += static_cast<double>(softplus(l) - yi * l);
    dlogit(i) = (sigmoid(l) - yi) / static_cast<S>(b);
  }
  parts.bce = bce / static_cast<double>(b);

  const double n_reg = static_cast<double>(params.regularized_count());
  const S l2 = static_cast<S>(cfg.lambda_l2 / n_reg);
  const S l1 = static_cast<S>(cfg.lambda_l1 / n_reg);
  {
    const auto bs = params.blocks();
    double reg = 0.0;
    for (std::size_t k = 0; k < ProbeParams<S>::kTrainable; ++k) {
      if (!ProbeParams<S>::kRegularized[k] || bs[k]->size() == 0) continue;
      reg += 0.5 * static_cast<double>(l2) * static_cast<double>(bs[k]->squaredNorm()) +
             static_cast<double>(l1) * static_cast<double>(bs[k]->cwiseAbs().sum());
    }
    parts.reg = reg;
  }

  const bool use_scl = hidden && cfg.architecture == Architecture::mlp_scl && cfg.scl_lambda > 0.0 && b >= 2;
  Mat<S> dh_scl;
  if (use_scl) {
    const S s = scl_loss<S>(h, y, static_cast<S>(cfg.temperature), grad ? &dh_scl : nullptr);
    parts.scl = cfg.scl_lambda * static_cast<double>(s);
  }

  if (!grad) return parts;

  ProbeParams<S>& g = *grad;
  g = params.zeros_like();
  if (!hidden) {
    g.w1 = dlogit.transpose() * xin;
    g.b1(0, 0) = dlogit.sum();
  } else {
    g.w2 = dlogit.transpose() * hd;
    g.b2(0, 0) = dlogit.sum();
    Mat<S> dh = dlogit * params.w2;
    if (drop_hidden) dh = (dh.array() * masks->hidden.array() * keep_scale).matrix();
    if (use_scl) dh += static_cast<S>(cfg.scl_lambda) * dh_scl;

    Mat<S> dhpre;
    if (cfg.activation == Activation::relu) {
      dhpre = (dh.array() * (hpre.array() > S(0)).template cast<S>()).matrix();
    } else {
      dhpre = dh.binaryExpr(hpre, [](S g_out, S v) {
        const S s = sigmoid(v);
        return g_out * s * (S(1) + v * (S(1) - s));
      });
    }

    Mat<S> dz;
    if (bn) {
      g.gamma = (dhpre.array() * zhat.array()).colwise().sum().matrix().transpose();
      g.beta = dhpre.colwise().sum().transpose();
      const Arr<S> dzhat = dhpre.array().rowwise() * as_row(params.gamma);
      if (bn_batch) {
        const S inv_b = S(1) / static_cast<S>(b);
        const Eigen::Array<S, 1, Eigen::Dynamic> sum_dzhat = dzhat.colwise().sum();
        const Eigen::Array<S, 1, Eigen::Dynamic> sum_dzhat_zhat = (dzhat * zhat.array()).colwise().sum();
        const Arr<S> inner = ((dzhat * static_cast<S>(b)).rowwise() - sum_dzhat) -
                             (zhat.array().rowwise() * sum_dzhat_zhat);
        dz = ((inner.rowwise() * inv_std) * inv_b).matrix();
      } else {
        dz = (dzhat.rowwise() * inv_std).matrix();
      }
    } else {
      dz = dhpre;
    }
    g.w1 = dz.transpose() * xin;
    g.b1 = dz.colwise().sum().transpose();
  }

  auto gb = g.blocks();
  const auto pb = params.blocks();
  for (std::size_t k = 0; k < ProbeParams<S>::kTrainable; ++k) {
    if (!ProbeParams<S>::kRegularized[k] || pb[k]->size() == 0) continue;
    *gb[k] += (l2 * pb[k]->array() + l1 * pb[k]->array().sign()).matrix();
  }
  return parts;
}

template <typename S>
Eigen::Matrix<S, Eigen::Dynamic, 1> probe_logits(const ProbeParams<S>& params, const Mat<S>& x,
                                                 const ProbeConfig& cfg) {
  if (x.cols() != params.w1.cols()) throw DomainError("probe_logits: input width mismatch");
  if (!params.has_hidden()) {
    Eigen::Matrix<S, Eigen::Dynamic, 1> l = x * params.w1.transpose();
    l.array() += params.b1(0, 0);
    return l;
  }
  Mat<S> z = x * params.w1.transpose();
  z.rowwise() += as_row(params.b1).matrix();
  if (params.has_batch_norm()) {
    const Eigen::Array<S, 1, Eigen::Dynamic> inv_std = (as_row(params.running_var) + static_cast<S>(cfg.bn_eps)).rsqrt();
    z = ((((z.array().rowwise() - as_row(params.running_mean)).rowwise() * inv_std).rowwise() *
          as_row(params.gamma))
             .rowwise() +
         as_row(params.beta))
            .matrix();
  }
  if (cfg.activation == Activation::relu) {
    z = z.cwiseMax(S(0));
  } else {
    z = z.unaryExpr([](S v) { return v * sigmoid(v); });
  }
  Eigen::Matrix<S, Eigen::Dynamic, 1> l = z * params.w2.transpose();
  l.array() += params.b2(0, 0);
  return l;
}

template struct ProbeParams<float>;
template struct ProbeParams<double>;
template ProbeParams<float> init_params<float>(const ProbeConfig&, std::size_t, std::uint64_t);
template ProbeParams<double> init_params<double>(const ProbeConfig&, std::size_t, std::uint64_t);
template ObjectiveParts probe_objective<float>(const ProbeParams<float>&, const Mat<float>&, std::span<const int>,
                                               const ProbeConfig&, Mode, const DropoutMasks<float>*,
                                               ProbeParams<float>*, Mat<float>*, Mat<float>*);
template ObjectiveParts probe_objective<double>(const ProbeParams<double>&, const Mat<double>&,
                                                std::span<const int>, const ProbeConfig&, Mode,
                                                const DropoutMasks<double>*, ProbeParams<double>*, Mat<double>*,
                                                Mat<double>*);
template Eigen::Matrix<float, Eigen::Dynamic, 1> probe_logits<float>(const ProbeParams<float>&, const Mat<float>&,
                                                                     const ProbeConfig&);
template Eigen::Matrix<double, Eigen::Dynamic, 1> probe_logits<double>(const ProbeParams<double>&,
                                                                       const Mat<double>&, const ProbeConfig&);

}  // namespace overflow
