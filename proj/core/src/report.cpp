// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "overflow/report.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "overflow/error.hpp"

namespace overflow {

using json = nlohmann::ordered_json;

namespace {

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string report_to_json(const EvalReport& r) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["dataset"] = r.config.dataset;
  j["stage"] = std::string(to_string(r.config.stage));
  j["feature_set"] = std::string(to_string(r.config.feature_set));
  j["probe"] = std::string(to_string(r.config.probe.architecture));
  j["config_digest"] = r.config_digest;
  j["config"] = json::parse(r.config.to_json());
  j["n"] = r.n;
  j["positives"] = r.positives;
  j["positive_rate"] = r.positive_rate;
  j["n_features"] = r.n_features;
  j["k"] = r.config.folds;
  j["fold_auc"] = r.fold_aucs();
  j["mean_auc"] = r.mean_auc;
  j["std_auc"] = r.std_auc;
  j["std_kind"] = "population";
  json folds = json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"fold", f.fold},
                     {"n_train", f.n_train},
                     {"n_test", f.n_test},
                     {"n_test_positive", f.n_test_positive},
                     {"auc", f.auc},
                     {"best_epoch", f.best_epoch},
                     {"epochs_run", f.epochs_run},
                     {"early_stopped", f.early_stopped}});
  }
  j["folds"] = folds;
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

EvalReport report_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    const int version = j.at("schema_version").get<int>();
    if (version != kReportSchemaVersion) {
      throw FormatError("unsupported report schema version " + std::to_string(version));
    }
    EvalReport r;
    r.config = ExperimentConfig::from_json(j.at("config").dump());
    r.config_digest = j.at("config_digest").get<std::string>();
    r.n = j.at("n").get<std::size_t>();
    r.positives = j.at("positives").get<std::size_t>();
    r.positive_rate = j.at("positive_rate").get<double>();
    r.n_features = j.at("n_features").get<std::size_t>();
    r.mean_auc = j.at("mean_auc").get<double>();
    r.std_auc = j.at("std_auc").get<double>();
    for (const auto& f : j.at("folds")) {
      FoldResult fr;
      fr.fold = f.at("fold").get<int>();
      fr.n_train = f.at("n_train").get<std::size_t>();
      fr.n_test = f.at("n_test").get<std::size_t>();
      fr.n_test_positive = f.at("n_test_positive").get<std::size_t>();
      fr.auc = f.at("auc").get<double>();
      fr.best_epoch = f.at("best_epoch").get<std::size_t>();
      fr.epochs_run = f.at("epochs_run").get<std::size_t>();
      fr.early_stopped = f.at("early_stopped").get<bool>();
      r.folds.push_back(fr);
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("report JSON is malformed: ") + e.what());
  }
}

std::string report_to_text(const EvalReport& r) {
  std::ostringstream o;
  o << "dataset:       " << r.config.dataset << '\n'
    << "stage:         " << to_string(r.config.stage) << '\n'
    << "feature set:   " << to_string(r.config.feature_set) << '\n'
    << "probe:         " << to_string(r.config.probe.architecture) << '\n'
    << "config digest: " << r.config_digest << '\n'
    << "instances:     " << r.n << " (" << r.positives << " positive, rate " << fixed3(r.positive_rate) << ")\n"
    << "features:      " << r.n_features << '\n'
    << "ROC-AUC:       " << fixed3(r.mean_auc) << " +/- " << fixed3(r.std_auc) << " (population std over "
    << r.folds.size() << " folds)\n";
  for (const auto& f : r.folds) {
    o << "  fold " << f.fold << ": " << fixed3(f.auc) << "  (train " << f.n_train << ", test " << f.n_test << ")\n";
  }
  for (const auto& w : r.warnings) o << "warning: " << w << '\n';
  return o.str();
}

std::string folds_csv(const EvalReport& r) {
  std::ostringstream o;
  o << "fold,n_train,n_test,n_test_positive,auc\n";
  for (const auto& f : r.folds) {
    o << f.fold << ',' << f.n_train << ',' << f.n_test << ',' << f.n_test_positive << ',' << full(f.auc) << '\n';
  }
  return o.str();
}

ReportGrid build_grid(const std::vector<EvalReport>& reports) {
  ReportGrid g;
  for (const auto& r : reports) {
    if (std::find(g.datasets.begin(), g.datasets.end(), r.config.dataset) == g.datasets.end()) {
      g.datasets.push_back(r.config.dataset);
    }
  }
  for (const auto& combo : kValidCombinations) {
    GridRow row{combo.stage, combo.feature_set, std::vector<std::optional<GridCell>>(g.datasets.size())};
    bool any = false;
    for (const auto& r : reports) {
      if (r.config.stage != combo.stage || r.config.feature_set != combo.feature_set) continue;
      const auto col = static_cast<std::size_t>(
          std::find(g.datasets.begin(), g.datasets.end(), r.config.dataset) - g.datasets.begin());
      if (row.cells[col]) {
        throw ConfigError("two reports for stage '" + std::string(to_string(combo.stage)) + "', feature set '" +
                          std::string(to_string(combo.feature_set)) + "', dataset '" + r.config.dataset + "'");
      }
      row.cells[col] = GridCell{r.mean_auc, r.std_auc, false, false};
      any = true;
    }
    if (any) g.rows.push_back(std::move(row));
  }
  for (std::size_t c = 0; c < g.datasets.size(); ++c) {
    std::vector<std::size_t> filled;
    for (std::size_t i = 0; i < g.rows.size(); ++i) {
      if (g.rows[i].cells[c]) filled.push_back(i);
    }
    std::stable_sort(filled.begin(), filled.end(), [&](std::size_t a, std::size_t b) {
      return g.rows[a].cells[c]->mean > g.rows[b].cells[c]->mean;
    });
    if (!filled.empty()) g.rows[filled[0]].cells[c]->best = true;
    if (filled.size() > 1) g.rows[filled[1]].cells[c]->second = true;
  }
  return g;
}

std::string grid_to_json(const ReportGrid& g) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["datasets"] = g.datasets;
  json rows = json::array();
  for (const auto& row : g.rows) {
    json cells = json::array();
    for (const auto& cell : row.cells) {
      if (!cell) {
        cells.push_back(nullptr);
        continue;
      }
      cells.push_back({{"mean_auc", cell->mean}, {"std_auc", cell->std}, {"best", cell->best}, {"second", cell->second}});
    }
    rows.push_back({{"stage", std::string(to_string(row.stage))},
                    {"feature_set", std::string(to_string(row.feature_set))},
                    {"cells", cells}});
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

std::string grid_to_text(const ReportGrid& g) {
  std::ostringstream o;
  o << "| stage | features |";
  for (const auto& d : g.datasets) o << ' ' << d << " |";
  o << "\n|---|---|";
  for (std::size_t i = 0; i < g.datasets.size(); ++i) o << "---|";
  o << '\n';
  for (const auto& row : g.rows) {
    o << "| " << to_string(row.stage) << " | " << to_string(row.feature_set) << " |";
    for (const auto& cell : row.cells) {
      if (!cell) {
        o << " - |";
        continue;
      }
      std::string v = fixed3(cell->mean) + " +/- " + fixed3(cell->std);
      if (cell->best) v = "**" + v + "**";
      if (cell->second) v = "_" + v + "_";
      o << ' ' << v << " |";
    }
    o << '\n';
  }
  return o.str();
}

}  // namespace overflow
