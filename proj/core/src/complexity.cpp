// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "overflow/complexity.hpp"

#include <zlib.h>

#include <cctype>
#include <vector>

#include "overflow/error.hpp"

namespace overflow {

std::size_t deflate_size(std::string_view bytes, int level) {
  z_stream zs{};
  // Negative window bits select a raw deflate stream without header/trailer.
  if (deflateInit2(&zs, level, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error("deflateInit2 failed");
  }
  std::vector<unsigned char> out(deflateBound(&zs, static_cast<uLong>(bytes.size())));
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(bytes.data()));
  zs.avail_in = static_cast<uInt>(bytes.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  const std::size_t produced = zs.total_out;
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error("deflate did not finish");
  return produced;
}

double compressibility(std::string_view bytes, const CompressorConfig& cfg) {
  if (bytes.empty()) throw DomainError("compressibility: empty input");
  if (cfg.codec != "deflate-raw") throw ConfigError("unsupported codec '" + cfg.codec + "'");
  return static_cast<double>(bytes.size()) / static_cast<double>(deflate_size(bytes, cfg.level));
}

std::int64_t whitespace_token_count(std::string_view text) {
  std::int64_t n = 0;
  bool in_token = false;
  for (unsigned char c : text) {
    const bool space = std::isspace(c) != 0;
    if (!space && !in_token) ++n;
    in_token = !space;
  }
  return n;
}

ComplexityFeatures context_complexity(const InstanceRecord& record, const ComplexityOptions& opts) {
  ComplexityFeatures f;
  if (record.token_count) {
    f.n_ctx = *record.token_count;
  } else if (opts.allow_whitespace_token_fallback) {
    f.n_ctx = whitespace_token_count(record.context);
    f.token_count_fallback = true;
  } else {
    throw MissingFeatureError(record.id, "token_count");
  }
  if (!record.perplexity) throw MissingFeatureError(record.id, "perplexity");
  f.ppl = *record.perplexity;
  f.compress_ratio = compressibility(record.context, opts.compressor);
  return f;
}

}  // namespace overflow
