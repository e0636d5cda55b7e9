// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "overflow/manifest.hpp"

namespace overflow {

/// Capacity-limited compression world. Each instance holds m unit fact
/// vectors (m balanced over blocks of consecutive instances); the compressed token keeps the sum of the first `capacity` of
/// them. The query carries the key of one target fact, whose slot is
/// marked by a boost of `key_alpha` on coordinate (slot - 1). The compressed
/// run answers correctly iff the target survived compression, flipped with
/// probability `label_noise`.
struct SynthConfig {
  std::string preset = "paper-mini";
  std::size_t n_instances = 2000;
  int m_min = 1;
  int m_max = 8;
  int capacity = 4;
  std::size_t fact_dim = 128;        ///< retriever space (preproj)
  std::size_t compressed_dim = 256;  ///< LLM space (postproj, mid, last)
  double noise_sigma = 0.05;
  double key_alpha = 1.0;
  double layer_noise = 0.05;
  double label_noise = 0.0;
  std::size_t nonx_tokens = 4;
  bool attention = true;
  std::uint64_t seed = 7;

  /// "paper-mini" or "tiny".
  static SynthConfig from_preset(std::string_view name);
  /// Throws ConfigError unless capacity >= 1, compressed_dim >= 8,
  /// label_noise in [0, 0.2], 1 <= m_min <= m_max <= fact_dim.
  void validate() const;
  std::string to_json() const;
};

/// P(target > capacity) under uniform m and uniform target, with label noise
/// folded in: p (1 - eps) + (1 - p) eps.
double analytic_overflow_rate(const SynthConfig& cfg);

/// One generated instance before anything touches disk.
struct SynthInstance {
  InstanceRecord record;
  int m = 0;
  int target = 0;  ///< 1-based
  std::vector<std::pair<std::string, std::vector<float>>> vectors;  ///< rep stage -> values
  std::vector<std::pair<std::string, std::pair<std::size_t, std::vector<float>>>> nonx;  ///< layer -> (rows, values)
  std::vector<float> attention;  ///< [2, 2, 8, 8] when enabled
};

SynthInstance generate_instance(const SynthConfig& cfg, std::size_t index);

struct SynthSummary {
  std::size_t n = 0;
  std::size_t positives = 0;
  std::filesystem::path manifest;
};

/// Writes `out_dir/manifest.jsonl`, `out_dir/tensors/<id>.<key>.ovt` and
/// `out_dir/synth.json` (config and digest). Instances are generated on up
/// to `jobs` threads; output bytes do not depend on `jobs`.
SynthSummary generate_overflow_world(const SynthConfig& cfg, const std::filesystem::path& out_dir,
                                     std::size_t jobs = 1);

/// Token-type corpus: class 1 ("compressed-like") is dense i.i.d. N(0, 1);
/// class 0 ("standard-token-like") has `sparsity` zeros and Laplace(0, 1)
/// non-zeros.
struct TokenCorpusConfig {
  std::size_t per_class = 2000;
  std::size_t dim = 4096;
  double sparsity = 0.9;
  std::uint64_t seed = 7;
};

struct TokenCorpus {
  Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> vectors;
  std::vector<int> labels;
};

TokenCorpus generate_token_type_corpus(const TokenCorpusConfig& cfg);

}  // namespace overflow
