// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "overflow/manifest.hpp"

namespace overflow {

/// Codec settings behind the compressibility ratio. Echoed into reports.
struct CompressorConfig {
  std::string codec = "deflate-raw";
  int level = 6;
};

/// Raw DEFLATE (RFC 1951, no zlib/gzip container) stream size in bytes.
std::size_t deflate_size(std::string_view bytes, int level = 6);

/// R = |bytes| / |deflate(bytes)|. Empty input is a DomainError.
double compressibility(std::string_view bytes, const CompressorConfig& cfg = {});

struct ComplexityFeatures {
  std::int64_t n_ctx = 0;
  double ppl = 0.0;
  double compress_ratio = 0.0;
  bool token_count_fallback = false;
};

struct ComplexityOptions {
  CompressorConfig compressor;
  /// When the record lacks token_count, count whitespace-separated tokens
  /// instead of failing. The result is flagged.
  bool allow_whitespace_token_fallback = false;
};

std::int64_t whitespace_token_count(std::string_view text);

/// {token_count, perplexity, compressibility(context)}. Missing
/// token_count / perplexity raise MissingFeatureError.
ComplexityFeatures context_complexity(const InstanceRecord& record, const ComplexityOptions& opts = {});

}  // namespace overflow
