// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include <algorithm>
#include <random>

#include "doctest.h"
#include "overflow/error.hpp"
#include "overflow/experiment.hpp"
#include "overflow/folds.hpp"
#include "overflow/report.hpp"

using namespace overflow;

namespace {

struct Data {
  Eigen::MatrixXd x;
  std::vector<int> y;
};

/// Label depends on the first two columns plus noise.
Data signal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Data d{Eigen::MatrixXd(static_cast<Eigen::Index>(n), 4), {}};
  for (std::size_t i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) d.x(static_cast<Eigen::Index>(i), j) = g(rng);
    const double z = d.x(static_cast<Eigen::Index>(i), 0) - 0.5 * d.x(static_cast<Eigen::Index>(i), 1) + 0.5 * g(rng);
    d.y.push_back(z > 0.4 ? 1 : 0);
  }
  return d;
}

ExperimentConfig logistic_cfg() {
  ExperimentConfig ec;
  ec.stage = Stage::pre_compression;
  ec.feature_set = FeatureSet::context;
  ec.probe = ProbeConfig::defaults(Architecture::logistic);
  ec.dataset = "toy";
  return ec;
}

}  // namespace

TEST_CASE("experiment: signal is found, permuted labels are not") {
  Data d = signal(500, 1);
  const EvalReport r = run_experiment(d.x, d.y, logistic_cfg());
  CHECK(r.mean_auc > 0.85);
  CHECK(r.folds.size() == 5);
  CHECK(r.n == 500);
  CHECK(r.n_features == 4);

  std::mt19937_64 rng(2);
  std::shuffle(d.y.begin(), d.y.end(), rng);
  const EvalReport null = run_experiment(d.x, d.y, logistic_cfg());
  CHECK(null.mean_auc >= 0.40);
  CHECK(null.mean_auc <= 0.60);
}

TEST_CASE("experiment: reports are bitwise reproducible and independent of thread count") {
  const Data d = signal(300, 3);
  ExperimentConfig ec = logistic_cfg();
  ec.probe = ProbeConfig::defaults(Architecture::mlp);
  ec.probe.hidden_dim = 16;
  ec.probe.max_epochs = 10;
  const std::string a = report_to_json(run_experiment(d.x, d.y, ec, 1));
  const std::string b = report_to_json(run_experiment(d.x, d.y, ec, 1));
  const std::string c = report_to_json(run_experiment(d.x, d.y, ec, 4));
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("experiment: scaler statistics come from the training fold only") {
  const Data d = signal(200, 4);
  const ExperimentConfig ec = logistic_cfg();
  std::vector<ProbeModel> models;
  const EvalReport r = run_experiment(d.x, d.y, ec, 2, &models);
  REQUIRE(models.size() == 5);
  const auto fold = stratified_folds(d.y, ec.folds, ec.seed);
  for (int f = 0; f < 5; ++f) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(4);
    int n = 0;
    for (std::size_t i = 0; i < d.y.size(); ++i) {
      if (fold[i] == f) continue;
      mean += d.x.row(static_cast<Eigen::Index>(i)).transpose();
      ++n;
    }
    mean /= n;
    CHECK((models[static_cast<std::size_t>(f)].scaler.mean - mean).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.folds[static_cast<std::size_t>(f)].n_train == static_cast<std::size_t>(n));
  }
}

TEST_CASE("experiment: degenerate inputs") {
  Data d = signal(50, 5);
  std::fill(d.y.begin(), d.y.end(), 0);
  CHECK_THROWS_AS(run_experiment(d.x, d.y, logistic_cfg()), SingleClassError);
  ExperimentConfig bad = logistic_cfg();
  bad.stage = Stage::pre_inference;
  d = signal(50, 5);
  CHECK_THROWS_AS(run_experiment(d.x, d.y, bad), ConfigError);
}

TEST_CASE("experiment config digest") {
  ExperimentConfig a = logistic_cfg();
  ExperimentConfig b = ExperimentConfig::from_json(a.to_json());
  CHECK(a.digest() == b.digest());
  b.seed = 8;
  CHECK(a.digest() != b.digest());
  CHECK(default_probe_config(FeatureSet::saturation).architecture == Architecture::logistic);
  CHECK(default_probe_config(FeatureSet::representation_joint).architecture == Architecture::linear);
}
