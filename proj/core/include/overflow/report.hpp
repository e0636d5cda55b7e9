// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "overflow/experiment.hpp"

namespace overflow {

inline constexpr int kReportSchemaVersion = 1;

/// Versioned machine-readable report. Holds no filesystem paths, so two runs
/// over relocated copies of the same data produce identical bytes.
std::string report_to_json(const EvalReport& r);
EvalReport report_from_json(std::string_view text);
std::string report_to_text(const EvalReport& r);
/// fold,n_train,n_test,n_test_positive,auc
std::string folds_csv(const EvalReport& r);

struct GridCell {
  double mean = 0.0;
  double std = 0.0;
  bool best = false;
  bool second = false;
};

struct GridRow {
  Stage stage;
  FeatureSet feature_set;
  std::vector<std::optional<GridCell>> cells;  ///< one per dataset column
};

/// Stage x feature-set rows (table order) against dataset columns (first
/// appearance order). The highest mean per column is flagged best and the
/// runner-up second; ties go to the earlier row.
struct ReportGrid {
  std::vector<std::string> datasets;
  std::vector<GridRow> rows;
};

/// Throws ConfigError when two reports share (stage, feature set, dataset).
ReportGrid build_grid(const std::vector<EvalReport>& reports);
std::string grid_to_json(const ReportGrid& g);
/// Markdown table; best cells in **bold**, second-best in _italics_.
std::string grid_to_text(const ReportGrid& g);

}  // namespace overflow
