// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "doctest.h"
#include "json.hpp"
#include "overflow/error.hpp"
#include "overflow/report.hpp"

using namespace overflow;
using nlohmann::json;

namespace {

EvalReport fake(Stage s, FeatureSet f, const std::string& ds, std::vector<double> aucs) {
  EvalReport r;
  r.config.stage = s;
  r.config.feature_set = f;
  r.config.dataset = ds;
  r.config_digest = r.config.digest();
  double sum = 0;
  for (std::size_t i = 0; i < aucs.size(); ++i) {
    FoldResult fr;
    fr.fold = static_cast<int>(i);
    fr.auc = aucs[i];
    fr.n_train = 80;
    fr.n_test = 20;
    fr.n_test_positive = 4;
    r.folds.push_back(fr);
    sum += aucs[i];
  }
  r.mean_auc = sum / static_cast<double>(aucs.size());
  double ss = 0;
  for (double a : aucs) ss += (a - r.mean_auc) * (a - r.mean_auc);
  r.std_auc = std::sqrt(ss / static_cast<double>(aucs.size()));
  r.n = 100;
  r.positives = 20;
  r.positive_rate = 0.2;
  r.n_features = 3;
  return r;
}

}  // namespace

TEST_CASE("report json round trip and schema") {
  const EvalReport r = fake(Stage::pre_compression, FeatureSet::context, "trivia", {0.6, 0.7, 0.8, 0.65, 0.75});
  const std::string text = report_to_json(r);
  const json j = json::parse(text);
  CHECK(j.at("schema_version") == kReportSchemaVersion);
  CHECK(j.at("std_kind") == "population");
  CHECK(j.at("fold_auc").size() == 5);
  CHECK(j.at("config_digest") == r.config_digest);
  CHECK(j.at("config").at("compressor").at("level") == 6);
  const EvalReport back = report_from_json(text);
  CHECK(report_to_json(back) == text);
  CHECK(back.fold_aucs() == r.fold_aucs());
  CHECK_THROWS_AS(report_from_json("{\"schema_version\": 99}"), FormatError);

  const std::string csv = folds_csv(r);
  CHECK(csv.rfind("fold,n_train,n_test,n_test_positive,auc\n", 0) == 0);
  CHECK(csv.find("\n0,80,20,4,0.59999999999999998\n") != std::string::npos);
  CHECK(report_to_text(r).find("trivia") != std::string::npos);
}

TEST_CASE("grid marks best and second per dataset") {
  std::vector<EvalReport> rs;
  const Stage st[6] = {Stage::pre_compression, Stage::pre_inference, Stage::pre_inference,
                       Stage::pre_inference,   Stage::post_inference, Stage::post_inference};
  const FeatureSet fs[6] = {FeatureSet::context,        FeatureSet::saturation,  FeatureSet::representation,
                            FeatureSet::representation_joint, FeatureSet::attention, FeatureSet::representation_joint};
  const double m[6] = {0.60, 0.52, 0.68, 0.72, 0.55, 0.70};
  for (int i = 5; i >= 0; --i) rs.push_back(fake(st[i], fs[i], "a", {m[i], m[i]}));
  rs.push_back(fake(Stage::pre_compression, FeatureSet::context, "b", {0.9, 0.9}));

  const ReportGrid g = build_grid(rs);
  CHECK(g.datasets == std::vector<std::string>{"a", "b"});
  REQUIRE(g.rows.size() == 6);
  CHECK(g.rows[0].stage == Stage::pre_compression);
  CHECK(g.rows[0].feature_set == FeatureSet::context);
  // Table order: representation, representation_joint, saturation within a stage.
  CHECK(g.rows[1].feature_set == FeatureSet::representation);
  CHECK(g.rows[2].feature_set == FeatureSet::representation_joint);
  CHECK(g.rows[2].cells[0]->best);
  CHECK(g.rows[5].cells[0]->second);
  CHECK_FALSE(g.rows[1].cells[0]->best);
  CHECK(g.rows[0].cells[1]->best);
  CHECK_FALSE(g.rows[1].cells[1].has_value());

  const json gj = json::parse(grid_to_json(g));
  CHECK(gj.at("rows").size() == 6);
  const std::string md = grid_to_text(g);
  CHECK(md.find("**0.720") != std::string::npos);
  CHECK(md.find("_0.700") != std::string::npos);

  rs.push_back(rs.front());
  CHECK_THROWS_AS(build_grid(rs), ConfigError);
}
