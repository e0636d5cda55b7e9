// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "overflow/probes/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "overflow/error.hpp"
#include "overflow/probes/logistic.hpp"
#include "overflow/rng.hpp"

namespace overflow {

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_holdout(std::span<const int> y,
                                                                                 double fraction,
                                                                                 std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw DomainError("stratified_holdout: fraction must be in (0, 1)");
  std::vector<std::size_t> train, val;
  for (int cls = 0; cls <= 1; ++cls) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == cls) idx.push_back(i);
    }
    Rng rng = make_rng(seed, streams::kValidationSplit, static_cast<std::uint64_t>(cls));
    std::shuffle(idx.begin(), idx.end(), rng);
    std::size_t n_val = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size())));
    if (idx.size() >= 2) n_val = std::clamp<std::size_t>(n_val, 1, idx.size() - 1);
    else n_val = 0;
    val.insert(val.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_val));
    train.insert(train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_val), idx.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(val.begin(), val.end());
  return {std::move(train), std::move(val)};
}

namespace {

using MatF = Mat<float>;

MatF gather_rows(const MatF& x, std::span<const std::size_t> rows) {
  MatF out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

double validation_bce(const ProbeParams<float>& p, const MatF& x, std::span<const int> y, const ProbeConfig& cfg) {
  const auto logits = probe_logits<float>(p, x, cfg);
  double total = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    const double l = logits(i);
    total += std::max(l, 0.0) + std::log1p(std::exp(-std::abs(l))) - y[static_cast<std::size_t>(i)] * l;
  }
  return total / static_cast<double>(logits.size());
}

MatF bernoulli_mask(Eigen::Index rows, Eigen::Index cols, double keep, Rng& rng) {
  std::bernoulli_distribution draw(keep);
  MatF m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = draw(rng) ? 1.0f : 0.0f;
  return m;
}

}  // namespace

ProbeParams<double> train_probe(const Eigen::MatrixXd& x, std::span<const int> y, const ProbeConfig& cfg,
                                TrainingTrace* trace) {
  cfg.validate();
  if (static_cast<Eigen::Index>(y.size()) != x.rows()) throw DomainError("train_probe: label count mismatch");
  bool has0 = false, has1 = false;
  for (int v : y) {
    if (v != 0 && v != 1) throw DomainError("train_probe: labels must be 0 or 1");
    (v ? has1 : has0) = true;
  }
  if (!(has0 && has1)) throw SingleClassError("train_probe: labels contain a single class");

  if (cfg.architecture == Architecture::logistic) {
    LogisticFit fit = train_logistic(x, y, cfg);
    if (trace) {
      *trace = {};
      trace->epochs_run = fit.iterations;
    }
    return fit.params;
  }

  const auto [train_idx, val_idx] = stratified_holdout(y, cfg.validation_fraction, cfg.seed);
  const MatF xf = x.cast<float>();
  const MatF x_val = gather_rows(xf, val_idx);
  std::vector<int> y_val;
  for (auto i : val_idx) y_val.push_back(y[i]);

  ProbeParams<float> params = init_params<float>(cfg, static_cast<std::size_t>(x.cols()), cfg.seed);
  ProbeParams<float> adam_m = params.zeros_like();
  ProbeParams<float> adam_v = params.zeros_like();
  ProbeParams<float> grad;
  ProbeParams<float> best = params;
  std::size_t adam_t = 0;

  const float lr = static_cast<float>(cfg.learning_rate);
  const float b1 = static_cast<float>(cfg.adam_beta1);
  const float b2 = static_cast<float>(cfg.adam_beta2);
  const float eps = static_cast<float>(cfg.adam_eps);
  const float mom = static_cast<float>(cfg.bn_momentum);
  const bool use_dropout = cfg.dropout > 0.0 && params.has_hidden();
  const double keep = 1.0 - cfg.dropout;

  TrainingTrace local;
  TrainingTrace& tr = trace ? *trace : local;
  tr = {};
  tr.best_val_loss = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  std::vector<std::size_t> order(train_idx.begin(), train_idx.end());
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    Rng shuffle_rng = make_rng(cfg.seed, streams::kProbeShuffle, epoch);
    Rng dropout_rng = make_rng(cfg.seed, streams::kProbeDropout, epoch);
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double epoch_loss = 0.0;
    std::size_t batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_no) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      const std::span<const std::size_t> rows(order.data() + start, stop - start);
      const MatF xb = gather_rows(xf, rows);
      std::vector<int> yb;
      yb.reserve(rows.size());
      for (auto i : rows) yb.push_back(y[i]);

      DropoutMasks<float> masks;
      if (use_dropout) {
        masks.input = bernoulli_mask(xb.rows(), xb.cols(), keep, dropout_rng);
        masks.hidden = bernoulli_mask(xb.rows(), params.w1.rows(), keep, dropout_rng);
      }
      // Batch statistics are undefined for a single row; fall back to the
      // running estimates for that batch.
      const Mode mode = params.has_batch_norm() && xb.rows() < 2 ? Mode::inference : Mode::train;
      MatF bmean, bvar;
      const ObjectiveParts parts =
          probe_objective<float>(params, xb, yb, cfg, mode, use_dropout ? &masks : nullptr, &grad, &bmean, &bvar);
      if (!std::isfinite(parts.total())) {
        throw TrainingError("non-finite training loss at epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(batch_no + 1));
      }
      epoch_loss += parts.total() * static_cast<double>(rows.size());

      ++adam_t;
      const float corr1 = 1.0f - std::pow(b1, static_cast<float>(adam_t));
      const float corr2 = 1.0f - std::pow(b2, static_cast<float>(adam_t));
      auto pb = params.blocks();
      auto gb = grad.blocks();
      auto mb = adam_m.blocks();
      auto vb = adam_v.blocks();
      for (std::size_t k = 0; k < ProbeParams<float>::kTrainable; ++k) {
        if (pb[k]->size() == 0) continue;
        *mb[k] = b1 * *mb[k] + (1.0f - b1) * *gb[k];
        *vb[k] = b2 * *vb[k] + (1.0f - b2) * gb[k]->cwiseAbs2();
        pb[k]->array() -= lr * (mb[k]->array() / corr1) / ((vb[k]->array() / corr2).sqrt() + eps);
      }
      if (mode == Mode::train && params.has_batch_norm()) {
        const float n = static_cast<float>(xb.rows());
        params.running_mean = (1.0f - mom) * params.running_mean + mom * bmean;
        params.running_var = (1.0f - mom) * params.running_var + mom * (bvar * (n / (n - 1.0f)));
      }
    }
    tr.train_loss.push_back(epoch_loss / static_cast<double>(order.size()));

    const double vloss = validation_bce(params, x_val, y_val, cfg);
    if (!std::isfinite(vloss)) {
      throw TrainingError("non-finite validation loss at epoch " + std::to_string(epoch));
    }
    tr.val_loss.push_back(vloss);
    tr.epochs_run = epoch;
    if (vloss < tr.best_val_loss) {
      tr.best_val_loss = vloss;
      tr.best_epoch = epoch;
      best = params;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      tr.early_stopped = true;
      break;
    }
  }
  return best.cast<double>();
}

}  // namespace overflow
