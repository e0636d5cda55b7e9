// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "overflow/features.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "overflow/attention.hpp"
#include "overflow/error.hpp"
#include "overflow/saturation.hpp"
#include "overflow/tensor_io.hpp"

namespace overflow {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::array<std::pair<Stage, std::string_view>, 7> kStageNames = {{
    {Stage::pre_compression, "pre_compression"},
    {Stage::pre_inference, "pre_inference"},
    {Stage::post_inference, "post_inference"},
    {Stage::pre_projection, "pre_projection"},
    {Stage::post_projection, "post_projection"},
    {Stage::middle_layer, "middle_layer"},
    {Stage::last_layer, "last_layer"},
}};

constexpr std::array<std::pair<FeatureSet, std::string_view>, 6> kFeatureSetNames = {{
    {FeatureSet::context, "context"},
    {FeatureSet::saturation, "saturation"},
    {FeatureSet::saturation_joint, "saturation_joint"},
    {FeatureSet::attention, "attention"},
    {FeatureSet::representation, "representation"},
    {FeatureSet::representation_joint, "representation_joint"},
}};

constexpr std::array<std::string_view, 3> kStatNames = {"hoyer", "spectral_entropy", "excess_kurtosis"};
constexpr std::array<std::string_view, 4> kSummaryNames = {"mean", "max", "min", "std"};

std::vector<double> load_vector(const InstanceRecord& r, const std::string& key) {
  const auto it = r.rep_paths.find(key);
  if (it == r.rep_paths.end()) throw MissingFeatureError(r.id, "rep_paths." + key);
  const Tensor t = read_tensor(it->second);
  if (t.rank() != 1) throw FormatError("instance '" + r.id + "': " + key + " must be a rank-1 tensor");
  return t.to_f64();
}

template <typename F>
auto with_instance(const InstanceRecord& r, F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw DomainError("instance '" + r.id + "': " + e.what());
  } catch (const FormatError& e) {
    const std::string what = e.what();
    if (what.rfind("instance '", 0) == 0) throw;
    throw FormatError("instance '" + r.id + "': " + what);
  }
}

void push_block(FeatureVector& out, std::string name, std::span<const double> values) {
  out.values.insert(out.values.end(), values.begin(), values.end());
  out.blocks.push_back({std::move(name), values.size()});
}

void push_scalar(FeatureVector& out, std::string name, double v) {
  out.values.push_back(v);
  out.blocks.push_back({std::move(name), 1});
}

void push_saturation(FeatureVector& out, const std::string& prefix, const SaturationStats& s) {
  const auto a = s.as_array();
  for (std::size_t i = 0; i < a.size(); ++i) push_scalar(out, prefix + "." + std::string(kStatNames[i]), a[i]);
}

void push_aggregated(FeatureVector& out, const std::string& prefix, const AggregatedStats& s) {
  const auto a = s.as_array();
  for (std::size_t i = 0; i < kStatNames.size(); ++i) {
    for (std::size_t j = 0; j < kSummaryNames.size(); ++j) {
      push_scalar(out, prefix + "." + std::string(kStatNames[i]) + "." + std::string(kSummaryNames[j]),
                  a[i * kSummaryNames.size() + j]);
    }
  }
}

std::vector<std::size_t> attention_layers(Stage stage, std::size_t n_layers) {
  const std::size_t mid = n_layers / 2;
  const std::size_t last = n_layers - 1;
  switch (stage) {
    case Stage::middle_layer:
      return {mid};
    case Stage::last_layer:
      return {last};
    default:
      return mid == last ? std::vector<std::size_t>{mid} : std::vector<std::size_t>{mid, last};
  }
}

void compose_attention(const InstanceRecord& r, Stage stage, FeatureVector& out) {
  if (!r.attn_path) throw MissingFeatureError(r.id, "attn_path");
  if (!r.xrag_positions || r.xrag_positions->empty()) throw MissingFeatureError(r.id, "xrag_positions");
  if (!r.query_positions || r.query_positions->empty()) throw MissingFeatureError(r.id, "query_positions");
  const Tensor attn = read_tensor(*r.attn_path);
  if (attn.rank() != 4) throw FormatError("instance '" + r.id + "': attention tensor must be rank 4");
  std::vector<std::int64_t> nonx;
  if (r.context_positions && !r.context_positions->empty()) {
    nonx = *r.context_positions;
  } else {
    nonx = complement_positions(attn.dim(2), *r.xrag_positions, *r.query_positions);
  }
  if (nonx.empty()) throw MissingFeatureError(r.id, "context_positions");
  const auto layers = attention_layers(stage, attn.dim(0));
  const AttentionFeatures f = attention_feature_vector(attn, *r.query_positions, *r.xrag_positions, nonx, layers);
  const auto a = f.as_array();
  constexpr std::array<std::string_view, 3> names = {"xrag_mass", "ratio", "entropy"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = 0; j < kSummaryNames.size(); ++j) {
      push_scalar(out, std::string(names[i]) + "." + std::string(kSummaryNames[j]), a[i * 4 + j]);
    }
  }
  out.ratio_capped = f.ratio_capped;
  out.rows_off_simplex = f.rows_off_simplex;
}

AggregatedStats nonx_stats(const InstanceRecord& r, std::string_view layer) {
  const std::string key(layer);
  const auto it = r.nonx_paths.find(key);
  if (it == r.nonx_paths.end()) throw MissingFeatureError(r.id, "nonx_paths." + key);
  const Tensor t = read_tensor(it->second);
  if (t.rank() != 2) throw FormatError("instance '" + r.id + "': nonx_paths." + key + " must be rank 2");
  std::vector<SaturationStats> profiles;
  profiles.reserve(t.dim(0));
  for (std::size_t i = 0; i < t.dim(0); ++i) {
    const auto row = t.row(i);
    profiles.push_back(saturation_profile(row));
  }
  return aggregate_saturation(profiles);
}

}  // namespace

Stage parse_stage(std::string_view s) {
  for (const auto& [v, name] : kStageNames) {
    if (name == s) return v;
  }
  throw ConfigError("unknown stage '" + std::string(s) + "'");
}

FeatureSet parse_feature_set(std::string_view s) {
  for (const auto& [v, name] : kFeatureSetNames) {
    if (name == s) return v;
  }
  throw ConfigError("unknown feature set '" + std::string(s) + "'");
}

std::string_view to_string(Stage s) {
  for (const auto& [v, name] : kStageNames) {
    if (v == s) return name;
  }
  return "?";
}

std::string_view to_string(FeatureSet f) {
  for (const auto& [v, name] : kFeatureSetNames) {
    if (v == f) return name;
  }
  return "?";
}

bool is_valid_combination(Stage stage, FeatureSet fs) {
  return std::any_of(kValidCombinations.begin(), kValidCombinations.end(),
                     [&](const StageFeature& c) { return c.stage == stage && c.feature_set == fs; });
}

void require_valid_combination(Stage stage, FeatureSet fs) {
  if (!is_valid_combination(stage, fs)) {
    throw ConfigError("feature set '" + std::string(to_string(fs)) + "' is not defined at stage '" +
                      std::string(to_string(stage)) + "'");
  }
}

std::vector<std::string_view> stage_layers(Stage stage) {
  switch (stage) {
    case Stage::pre_compression:
      return {};
    case Stage::pre_inference:
      return {"preproj", "postproj"};
    case Stage::post_inference:
      return {"mid", "last"};
    case Stage::pre_projection:
      return {"preproj"};
    case Stage::post_projection:
      return {"postproj"};
    case Stage::middle_layer:
      return {"mid"};
    case Stage::last_layer:
      return {"last"};
  }
  return {};
}

bool is_representation_set(FeatureSet fs) {
  return fs == FeatureSet::representation || fs == FeatureSet::representation_joint;
}

std::vector<std::string> expand_columns(const std::vector<FeatureBlock>& blocks) {
  std::vector<std::string> cols;
  for (const auto& b : blocks) {
    if (b.width == 1) {
      cols.push_back(b.name);
      continue;
    }
    for (std::size_t i = 0; i < b.width; ++i) cols.push_back(b.name + "[" + std::to_string(i) + "]");
  }
  return cols;
}

FeatureVector compose_features(const InstanceRecord& r, Stage stage, FeatureSet fs, const FeatureOptions& opts) {
  require_valid_combination(stage, fs);
  FeatureVector out;
  with_instance(r, [&] {
    switch (fs) {
      case FeatureSet::context: {
        const ComplexityFeatures c = context_complexity(r, opts.complexity);
        push_scalar(out, "n_ctx", static_cast<double>(c.n_ctx));
        push_scalar(out, "ppl", c.ppl);
        push_scalar(out, "compress_ratio", c.compress_ratio);
        out.token_count_fallback = c.token_count_fallback;
        break;
      }
      case FeatureSet::saturation:
        for (auto layer : stage_layers(stage)) {
          const std::string key = "x_" + std::string(layer);
          push_saturation(out, key, saturation_profile(load_vector(r, key)));
        }
        break;
      case FeatureSet::saturation_joint:
        for (auto layer : stage_layers(stage)) {
          const std::string key = "x_" + std::string(layer);
          push_saturation(out, key, saturation_profile(load_vector(r, key)));
          push_aggregated(out, "nonx_" + std::string(layer), nonx_stats(r, layer));
        }
        break;
      case FeatureSet::attention:
        compose_attention(r, stage, out);
        break;
      case FeatureSet::representation:
      case FeatureSet::representation_joint: {
        std::vector<std::string> keys;
        for (auto layer : stage_layers(stage)) keys.push_back("x_" + std::string(layer));
        if (fs == FeatureSet::representation_joint) {
          for (auto layer : stage_layers(stage)) keys.push_back("q_" + std::string(layer));
        }
        for (const auto& key : keys) push_block(out, key, load_vector(r, key));
        break;
      }
    }
    return 0;
  });
  return out;
}

FeatureMatrix build_feature_matrix(const std::vector<InstanceRecord>& records, Stage stage, FeatureSet fs,
                                   const FeatureOptions& opts, std::size_t jobs) {
  require_valid_combination(stage, fs);
  if (records.empty()) throw DomainError("no records to compose features from");
  const std::size_t n = records.size();
  std::vector<std::optional<FeatureVector>> rows(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        rows[i] = compose_features(records[i], stage, fs, opts);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(jobs, 1, n);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  FeatureMatrix fm;
  fm.stage = stage;
  fm.feature_set = fs;
  const auto& blocks = rows[0]->blocks;
  fm.columns = expand_columns(blocks);
  fm.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(fm.columns.size()));
  for (std::size_t i = 0; i < n; ++i) {
    const FeatureVector& v = *rows[i];
    if (v.blocks != blocks) {
      throw FormatError("instance '" + records[i].id + "': feature layout differs from instance '" +
                        records[0].id + "' (mismatched dimensions)");
    }
    fm.x.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXd>(v.values.data(), static_cast<Eigen::Index>(v.values.size()));
    fm.ids.push_back(records[i].id);
    fm.token_count_fallbacks += v.token_count_fallback ? 1 : 0;
    fm.ratio_capped += v.ratio_capped;
    fm.rows_off_simplex += v.rows_off_simplex;
  }
  return fm;
}

void save_feature_cache(const FeatureMatrix& fm, const fs::path& path, const std::string& digest) {
  const auto rows = static_cast<std::size_t>(fm.x.rows());
  const auto cols = static_cast<std::size_t>(fm.x.cols());
  if (rows == 0 || cols == 0) throw DomainError("cannot cache an empty feature matrix");
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = fm.x;
  write_tensor(Tensor({rows, cols}, std::vector<double>(rm.data(), rm.data() + rm.size())), path);

  json j;
  j["format_version"] = 1;
  j["stage"] = std::string(to_string(fm.stage));
  j["feature_set"] = std::string(to_string(fm.feature_set));
  j["config_digest"] = digest;
  j["rows"] = rows;
  j["cols"] = cols;
  j["ids"] = fm.ids;
  j["columns"] = fm.columns;
  j["token_count_fallbacks"] = fm.token_count_fallbacks;
  j["ratio_capped"] = fm.ratio_capped;
  j["rows_off_simplex"] = fm.rows_off_simplex;
  const fs::path side = fs::path(path.string() + ".json");
  const fs::path tmp = fs::path(side.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << j.dump(1) << '\n';
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, side, ec);
  if (ec) throw IoError("cannot finalize " + side.string() + ": " + ec.message());
}

FeatureMatrix load_feature_cache(const fs::path& path, std::string* digest) {
  const fs::path side = fs::path(path.string() + ".json");
  std::ifstream in(side, std::ios::binary);
  if (!in) throw IoError("cannot open feature sidecar " + side.string());
  std::stringstream ss;
  ss << in.rdbuf();
  FeatureMatrix fm;
  try {
    const json j = json::parse(ss.str());
    fm.stage = parse_stage(j.at("stage").get<std::string>());
    fm.feature_set = parse_feature_set(j.at("feature_set").get<std::string>());
    fm.ids = j.at("ids").get<std::vector<std::string>>();
    fm.columns = j.at("columns").get<std::vector<std::string>>();
    fm.token_count_fallbacks = j.value("token_count_fallbacks", std::size_t{0});
    fm.ratio_capped = j.value("ratio_capped", std::size_t{0});
    fm.rows_off_simplex = j.value("rows_off_simplex", std::size_t{0});
    if (digest) *digest = j.at("config_digest").get<std::string>();
  } catch (const json::exception& e) {
    throw FormatError("feature sidecar " + side.string() + " is malformed: " + e.what());
  }
  const Tensor t = read_tensor(path);
  if (t.rank() != 2 || t.dim(0) != fm.ids.size() || t.dim(1) != fm.columns.size()) {
    throw FormatError("feature cache " + path.string() + " does not match its sidecar");
  }
  const auto v = t.to_f64();
  fm.x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      v.data(), static_cast<Eigen::Index>(t.dim(0)), static_cast<Eigen::Index>(t.dim(1)));
  return fm;
}

}  // namespace overflow
