// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace overflow::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kJudgeUnavailable = 3 };

/// Every value the command line can set. Defaults live in the option table.
struct Options {
  std::string config_path;
  std::uint64_t seed = 7;
  std::size_t jobs = 1;

  // synth
  std::string preset = "paper-mini";
  std::string out;
  std::size_t n_instances = 0;
  int capacity = 0;
  int m_min = 0;
  int m_max = 0;
  std::size_t fact_dim = 0;
  std::size_t compressed_dim = 0;
  double noise_sigma = 0.0;
  double label_noise = 0.0;
  bool no_attention = false;
  std::size_t per_class = 2000;
  std::size_t dim = 4096;

  // features / eval inputs
  std::string manifest;
  std::string stage;
  std::string feature_set;
  std::string cache;
  std::string labels;
  bool whitespace_fallback = false;
  int level = 6;

  // labeling
  std::string judge = "manifest";
  std::string judge_url;
  double timeout_s = 30.0;
  std::size_t max_in_flight = 4;
  bool raw_substring = false;

  // probes
  std::string probe;
  std::size_t max_epochs = 0;
  std::size_t hidden_dim = 0;
  std::size_t batch_size = 0;
  std::size_t patience = 0;
  double learning_rate = 0.0;
  double lambda_l2 = -1.0;
  double lambda_l1 = -1.0;

  // eval / report
  int folds = 5;
  std::string dataset = "unnamed";
  std::vector<std::string> reports;
};

/// Builds the full option tree bound to `opts`.
std::unique_ptr<CLI::App> build_app(Options& opts);

/// Parses, merges --config, runs the selected subcommand and maps failures
/// to exit codes: 0 ok, 1 usage, 2 data, 3 judge unavailable.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace overflow::cli
