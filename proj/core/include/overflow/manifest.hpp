// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace overflow {

/// Stage keys accepted in `rep_paths`.
inline constexpr std::array<std::string_view, 8> kRepStages = {
    "q_preproj", "q_postproj", "q_mid", "q_last", "x_preproj", "x_postproj", "x_mid", "x_last"};

/// Layer keys accepted in `nonx_paths` (rank-2 matrices of non-compressed
/// token states, one row per token).
inline constexpr std::array<std::string_view, 4> kLayerKeys = {"preproj", "postproj", "mid", "last"};

/// One QA instance as exported by the extractor or the synthetic generator.
struct InstanceRecord {
  std::string id;
  std::string question;
  std::string context;
  std::vector<std::string> answers;
  std::optional<std::string> ref_output;
  std::optional<std::string> comp_output;
  std::optional<bool> ref_correct;
  std::optional<bool> comp_correct;
  std::optional<std::int64_t> token_count;
  std::optional<double> perplexity;
  // Paths are absolute (or manifest-relative resolved) after read_manifest.
  std::map<std::string, std::filesystem::path> rep_paths;
  std::map<std::string, std::filesystem::path> nonx_paths;
  std::optional<std::filesystem::path> attn_path;
  std::optional<std::vector<std::int64_t>> xrag_positions;
  std::optional<std::vector<std::int64_t>> query_positions;
  std::optional<std::vector<std::int64_t>> context_positions;
  // Filled in by labeling.
  std::optional<int> overflow;
  std::optional<std::string> judge;
};

/// Parses a JSONL manifest. Relative paths resolve against the manifest's
/// directory. Throws FormatError naming the 1-based line on malformed input
/// and on duplicate ids.
std::vector<InstanceRecord> read_manifest(const std::filesystem::path& path);

/// Writes records as JSONL. Tensor paths are written relative to the
/// manifest's directory when they live beneath it.
void write_manifest(const std::vector<InstanceRecord>& records, const std::filesystem::path& path);

/// Checks the record-level invariants that do not require opening tensors.
void validate_record(const InstanceRecord& r);

/// Opens every referenced tensor and checks ranks (rep: 1, nonx: 2, attn: 4)
/// and position ranges against the attention sequence length.
void validate_record_tensors(const InstanceRecord& r);

}  // namespace overflow
