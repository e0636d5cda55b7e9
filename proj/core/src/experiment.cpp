// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "overflow/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "json.hpp"
#include "overflow/digest.hpp"
#include "overflow/error.hpp"
#include "overflow/folds.hpp"
#include "overflow/rng.hpp"
#include "overflow/roc_auc.hpp"

namespace overflow {

using json = nlohmann::json;

ProbeConfig default_probe_config(FeatureSet fs) {
  return ProbeConfig::defaults(is_representation_set(fs) ? Architecture::linear : Architecture::logistic);
}

std::string ExperimentConfig::to_json() const {
  ProbeConfig p = probe;
  p.seed = seed;
  json j;
  j["stage"] = std::string(to_string(stage));
  j["feature_set"] = std::string(to_string(feature_set));
  j["probe"] = json::parse(p.to_json());
  j["folds"] = folds;
  j["seed"] = seed;
  j["dataset"] = dataset;
  j["compressor"] = {{"codec", compressor.codec}, {"level", compressor.level}};
  j["judge"] = std::string(to_string(judge));
  return j.dump();
}

ExperimentConfig ExperimentConfig::from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    ExperimentConfig c;
    c.stage = parse_stage(j.at("stage").get<std::string>());
    c.feature_set = parse_feature_set(j.at("feature_set").get<std::string>());
    c.probe = ProbeConfig::from_json(j.at("probe").dump());
    c.folds = j.at("folds").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.dataset = j.at("dataset").get<std::string>();
    c.compressor.codec = j.at("compressor").at("codec").get<std::string>();
    c.compressor.level = j.at("compressor").at("level").get<int>();
    c.judge = parse_judge_mode(j.at("judge").get<std::string>());
    return c;
  } catch (const json::exception& e) {
    throw FormatError(std::string("experiment config is malformed: ") + e.what());
  }
}

std::string ExperimentConfig::digest() const { return config_digest(to_json()); }

std::vector<double> EvalReport::fold_aucs() const {
  std::vector<double> v;
  for (const auto& f : folds) v.push_back(f.auc);
  return v;
}

EvalReport run_experiment(const Eigen::MatrixXd& x, std::span<const int> y, const ExperimentConfig& cfg,
                          std::size_t jobs, std::vector<ProbeModel>* models) {
  require_valid_combination(cfg.stage, cfg.feature_set);
  if (static_cast<Eigen::Index>(y.size()) != x.rows()) throw DomainError("run_experiment: label count mismatch");
  cfg.probe.validate();

  EvalReport report;
  report.config = cfg;
  report.config.probe.seed = cfg.seed;
  report.config_digest = cfg.digest();
  report.n = y.size();
  for (int v : y) report.positives += v == 1 ? 1 : 0;
  report.positive_rate = report.n ? static_cast<double>(report.positives) / static_cast<double>(report.n) : 0.0;
  report.n_features = static_cast<std::size_t>(x.cols());

  const std::vector<int> fold_of = stratified_folds(y, cfg.folds, cfg.seed);
  const auto k = static_cast<std::size_t>(cfg.folds);
  std::vector<FoldResult> results(k);
  std::vector<ProbeModel> fitted(k);
  std::vector<std::exception_ptr> errors(k);

  auto run_fold = [&](std::size_t f) {
    std::vector<Eigen::Index> train_rows, test_rows;
    for (std::size_t i = 0; i < y.size(); ++i) {
      (static_cast<std::size_t>(fold_of[i]) == f ? test_rows : train_rows).push_back(static_cast<Eigen::Index>(i));
    }
    Eigen::MatrixXd x_train(static_cast<Eigen::Index>(train_rows.size()), x.cols());
    Eigen::MatrixXd x_test(static_cast<Eigen::Index>(test_rows.size()), x.cols());
    std::vector<int> y_train, y_test;
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
      x_train.row(static_cast<Eigen::Index>(i)) = x.row(train_rows[i]);
      y_train.push_back(y[static_cast<std::size_t>(train_rows[i])]);
    }
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      x_test.row(static_cast<Eigen::Index>(i)) = x.row(test_rows[i]);
      y_test.push_back(y[static_cast<std::size_t>(test_rows[i])]);
    }
    FoldResult& r = results[f];
    r.fold = static_cast<int>(f);
    r.n_train = train_rows.size();
    r.n_test = test_rows.size();
    for (int v : y_test) r.n_test_positive += static_cast<std::size_t>(v);
    if (r.n_test_positive == 0 || r.n_test_positive == r.n_test) {
      throw SingleClassError("fold " + std::to_string(f) + " has a single-class test split");
    }

    ProbeConfig pc = cfg.probe;
    pc.seed = derive_seed(cfg.seed, streams::kFoldProbe, f);
    ProbeModel m = fit_probe(x_train, y_train, pc);
    const Eigen::VectorXd scores = predict_scores(m, x_test);
    r.auc = roc_auc(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())), y_test);
    r.best_epoch = m.trace.best_epoch;
    r.epochs_run = m.trace.epochs_run;
    r.early_stopped = m.trace.early_stopped;
    fitted[f] = std::move(m);
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t f = next.fetch_add(1); f < k; f = next.fetch_add(1)) {
      try {
        run_fold(f);
      } catch (...) {
        errors[f] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(jobs, 1, k);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  report.folds = std::move(results);
  double sum = 0.0;
  for (const auto& f : report.folds) sum += f.auc;
  report.mean_auc = sum / static_cast<double>(k);
  double ss = 0.0;
  for (const auto& f : report.folds) ss += (f.auc - report.mean_auc) * (f.auc - report.mean_auc);
  report.std_auc = std::sqrt(ss / static_cast<double>(k));

  for (std::size_t f = 0; f < k; ++f) {
    if (fitted[f].scaler.floored > 0) {
      report.warnings.push_back("fold " + std::to_string(f) + ": " + std::to_string(fitted[f].scaler.floored) +
                                " constant feature column(s); std floored");
    }
  }
  if (models) *models = std::move(fitted);
  return report;
}

}  // namespace overflow
