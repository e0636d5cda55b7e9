// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "overflow/manifest.hpp"

namespace overflow {

/// Overflow iff the reference run was correct and the compressed run was not.
int overflow_label(bool ref_correct, bool comp_correct);

/// Degradation-threshold variant: 1 iff t_ref - t_comp >= eps (inclusive).
/// Requires eps >= 0 and both metrics in [0, 1].
int overflow_label_threshold(double t_ref, double t_comp, double eps);

struct SubstringOptions {
  /// Byte-exact containment instead of casefold + whitespace collapsing.
  bool raw = false;
};

/// Unicode case fold, collapse whitespace runs to one space, trim.
std::string normalize_answer(std::string_view text);

/// True iff the normalized prediction contains any normalized reference
/// answer as a contiguous substring. Empty answer list is a DomainError.
bool judge_substring(std::string_view prediction, const std::vector<std::string>& answers,
                     const SubstringOptions& opts = {});

struct JudgeEndpoint {
  std::string url;
  double timeout_s = 30.0;
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{500};  ///< doubled after every failed attempt
  std::size_t max_in_flight = 4;
};

/// POSTs {"question", "reference_answers", "prediction"} and expects
/// {"correct": bool}. Throws JudgeUnavailableError once the retry budget is
/// spent and JudgeProtocolError on a malformed 200 response.
bool judge_external(const JudgeEndpoint& endpoint, std::string_view question,
                    const std::vector<std::string>& answers, std::string_view prediction);

enum class JudgeMode { manifest, substring, external };

JudgeMode parse_judge_mode(std::string_view s);
std::string_view to_string(JudgeMode m);

/// Where a label's correctness flags came from.
enum class Provenance { manifest, substring, external };
std::string_view to_string(Provenance p);

struct LabeledInstance {
  std::string id;
  int overflow = 0;
  Provenance provenance = Provenance::manifest;
  InstanceRecord record;  ///< with ref_correct/comp_correct/overflow filled in
};

struct DatasetCounts {
  std::size_t total = 0;
  std::size_t kept = 0;
  std::size_t dropped = 0;        ///< reference run incorrect
  std::size_t judge_skipped = 0;  ///< external judge unavailable or protocol violation
  std::size_t errors = 0;         ///< neither outputs nor flags available
  std::size_t positives = 0;
  std::size_t external_calls_ok = 0;

  bool single_class() const { return kept > 0 && (positives == 0 || positives == kept); }
};

struct LabeledDataset {
  std::vector<LabeledInstance> instances;  ///< manifest order
  DatasetCounts counts;
  std::vector<std::string> messages;  ///< per-record problems, in manifest order
};

struct LabelingOptions {
  JudgeMode mode = JudgeMode::manifest;
  SubstringOptions substring;
  JudgeEndpoint endpoint;
};

/// Fills missing correctness flags with the selected judge (manifest flags
/// always win), keeps only reference-correct records and labels overflow.
LabeledDataset build_dataset(const std::vector<InstanceRecord>& records, const LabelingOptions& opts);

}  // namespace overflow
