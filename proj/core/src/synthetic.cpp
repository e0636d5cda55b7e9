// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "overflow/synthetic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numeric>
#include <random>
#include <thread>

#include "json.hpp"
#include "overflow/complexity.hpp"
#include "overflow/digest.hpp"
#include "overflow/error.hpp"
#include "overflow/labeling.hpp"
#include "overflow/rng.hpp"
#include "overflow/tensor_io.hpp"

namespace overflow {

using json = nlohmann::json;
namespace fs = std::filesystem;

SynthConfig SynthConfig::from_preset(std::string_view name) {
  SynthConfig c;
  if (name == "paper-mini") return c;
  if (name == "tiny") {
    c.preset = "tiny";
    c.n_instances = 200;
    c.fact_dim = 16;
    c.compressed_dim = 32;
    return c;
  }
  throw ConfigError("unknown synthetic preset '" + std::string(name) + "' (expected paper-mini or tiny)");
}

void SynthConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("invalid synthetic config: ") + what);
  };
  require(n_instances >= 1, "n_instances must be >= 1");
  require(capacity >= 1, "capacity must be >= 1");
  require(compressed_dim >= 8, "compressed_dim must be >= 8");
  require(fact_dim >= 2, "fact_dim must be >= 2");
  require(m_min >= 1 && m_min <= m_max, "need 1 <= m_min <= m_max");
  require(static_cast<std::size_t>(m_max) <= fact_dim, "m_max must not exceed fact_dim (one slot coordinate per fact)");
  require(label_noise >= 0.0 && label_noise <= 0.2, "label_noise must be in [0, 0.2]");
  require(noise_sigma >= 0.0 && layer_noise >= 0.0, "noise levels must be >= 0");
  require(nonx_tokens >= 1, "nonx_tokens must be >= 1");
}

std::string SynthConfig::to_json() const {
  json j;
  j["preset"] = preset;
  j["n_instances"] = n_instances;
  j["m_min"] = m_min;
  j["m_max"] = m_max;
  j["capacity"] = capacity;
  j["fact_dim"] = fact_dim;
  j["compressed_dim"] = compressed_dim;
  j["noise_sigma"] = noise_sigma;
  j["key_alpha"] = key_alpha;
  j["layer_noise"] = layer_noise;
  j["label_noise"] = label_noise;
  j["nonx_tokens"] = nonx_tokens;
  j["attention"] = attention;
  j["seed"] = seed;
  return j.dump();
}

double analytic_overflow_rate(const SynthConfig& cfg) {
  double p = 0.0;
  const double n_m = static_cast<double>(cfg.m_max - cfg.m_min + 1);
  for (int m = cfg.m_min; m <= cfg.m_max; ++m) {
    if (m > cfg.capacity) p += (static_cast<double>(m - cfg.capacity) / m) / n_m;
  }
  return p * (1.0 - cfg.label_noise) + (1.0 - p) * cfg.label_noise;
}

namespace {

using Vec = Eigen::VectorXd;
using MatD = Eigen::MatrixXd;

// Attention layout: three context tokens, one compressed token, four query tokens.
constexpr std::size_t kAttnLayers = 2;
constexpr std::size_t kAttnHeads = 2;
constexpr std::int64_t kAttnContext = 3;
constexpr std::int64_t kAttnXrag = 3;
constexpr std::int64_t kAttnQuery = 4;
constexpr std::size_t kAttnLen = static_cast<std::size_t>(kAttnContext + 1 + kAttnQuery);

struct World {
  MatD proj;    ///< compressed_dim x fact_dim
  MatD to_mid;  ///< compressed_dim x compressed_dim
  MatD to_last;
};

World make_world(const SynthConfig& cfg) {
  Rng rng = make_rng(cfg.seed, streams::kSynthGlobal, 0);
  std::normal_distribution<double> n01(0.0, 1.0);
  const auto dc = static_cast<Eigen::Index>(cfg.compressed_dim);
  const auto df = static_cast<Eigen::Index>(cfg.fact_dim);
  auto gaussian = [&](Eigen::Index rows, Eigen::Index cols) {
    MatD m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = n01(rng);
    }
    return m;
  };
  World w;
  w.proj = gaussian(dc, df) / std::sqrt(static_cast<double>(df));
  w.to_mid = MatD::Identity(dc, dc) + 0.3 * gaussian(dc, dc) / std::sqrt(static_cast<double>(dc));
  w.to_last = MatD::Identity(dc, dc) + 0.3 * gaussian(dc, dc) / std::sqrt(static_cast<double>(dc));
  return w;
}

Vec gaussian_vec(std::size_t d, Rng& rng, double sigma = 1.0) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = sigma * n(rng);
  return v;
}

std::vector<float> to_f32(const Vec& v) {
  std::vector<float> out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = static_cast<float>(v(i));
  return out;
}

std::string random_word(Rng& rng) {
  std::uniform_int_distribution<int> letter(0, 25);
  std::string w(6, 'a');
  for (auto& ch : w) ch = static_cast<char>('a' + letter(rng));
  return w;
}

std::string instance_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "syn-%06zu", index);
  return buf;
}

const World& cached_world(const SynthConfig& cfg) {
  thread_local std::string key;
  thread_local World world;
  const std::string k = cfg.to_json();
  if (k != key) {
    world = make_world(cfg);
    key = k;
  }
  return world;
}

constexpr std::string_view kNoAnswer = "I cannot tell from the compressed context.";

}  // namespace

SynthInstance generate_instance(const SynthConfig& cfg, std::size_t index) {
  cfg.validate();
  const World& w = cached_world(cfg);
  Rng rng = make_rng(cfg.seed, streams::kSynthInstance, index);

  SynthInstance inst;
  // Fact counts are balanced per block of (m_max - m_min + 1) consecutive
  // instances: each block deals a seeded permutation of the range.
  {
    const auto span = static_cast<std::size_t>(cfg.m_max - cfg.m_min + 1);
    std::vector<int> block(span);
    std::iota(block.begin(), block.end(), cfg.m_min);
    Rng block_rng = make_rng(cfg.seed, streams::kSynthGlobal, 1 + index / span);
    std::shuffle(block.begin(), block.end(), block_rng);
    inst.m = block[index % span];
  }
  inst.target = std::uniform_int_distribution<int>(1, inst.m)(rng);
  const int kept = std::min(inst.m, cfg.capacity);

  std::vector<Vec> facts;
  std::vector<Vec> keys;
  for (int j = 0; j < inst.m; ++j) {
    Vec v = gaussian_vec(cfg.fact_dim, rng);
    v.normalize();
    Vec key = v;
    key(j) += cfg.key_alpha;
    key.normalize();
    facts.push_back(std::move(v));
    keys.push_back(std::move(key));
  }
  Vec sum = Vec::Zero(static_cast<Eigen::Index>(cfg.fact_dim));
  for (int j = 0; j < kept; ++j) sum += facts[static_cast<std::size_t>(j)];

  const Vec& key_t = keys[static_cast<std::size_t>(inst.target - 1)];
  const Vec x_pre = sum + gaussian_vec(cfg.fact_dim, rng, cfg.noise_sigma);
  const Vec x_post = w.proj * sum + gaussian_vec(cfg.compressed_dim, rng, cfg.noise_sigma);
  const Vec x_mid = w.to_mid * x_post + gaussian_vec(cfg.compressed_dim, rng, cfg.layer_noise);
  const Vec x_last = w.to_last * x_mid + gaussian_vec(cfg.compressed_dim, rng, cfg.layer_noise);
  const Vec q_pre = key_t + gaussian_vec(cfg.fact_dim, rng, cfg.noise_sigma);
  const Vec q_post = w.proj * key_t + gaussian_vec(cfg.compressed_dim, rng, cfg.noise_sigma);
  const Vec q_mid = w.to_mid * q_post + gaussian_vec(cfg.compressed_dim, rng, cfg.layer_noise);
  const Vec q_last = w.to_last * q_mid + gaussian_vec(cfg.compressed_dim, rng, cfg.layer_noise);

  const bool flip = std::bernoulli_distribution(cfg.label_noise)(rng);
  const bool survived = inst.target <= cfg.capacity;
  const bool comp_correct = survived != flip;

  // Non-compressed (query) tokens: sparse heavy-tailed rows plus a share of
  // the query state.
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  auto token_rows = [&](const Vec& q) {
    const auto d = static_cast<std::size_t>(q.size());
    std::vector<float> rows;
    for (std::size_t t = 0; t < cfg.nonx_tokens; ++t) {
      Vec r = 0.3 * q;
      for (std::size_t i = 0; i < d; ++i) {
        if (u01(rng) < 0.25) {
          const double mag = expo(rng);
          r(static_cast<Eigen::Index>(i)) += u01(rng) < 0.5 ? -mag : mag;
        }
      }
      const auto f = to_f32(r);
      rows.insert(rows.end(), f.begin(), f.end());
    }
    return rows;
  };
  inst.nonx.push_back({"mid", {cfg.nonx_tokens, token_rows(q_mid)}});
  inst.nonx.push_back({"last", {cfg.nonx_tokens, token_rows(q_last)}});

  if (cfg.attention) {
    inst.attention.assign(kAttnLayers * kAttnHeads * kAttnLen * kAttnLen, 0.0f);
    std::normal_distribution<double> n01(0.0, 1.0);
    for (std::size_t l = 0; l < kAttnLayers; ++l) {
      for (std::size_t h = 0; h < kAttnHeads; ++h) {
        const double bias = n01(rng);
        for (std::size_t i = 0; i < kAttnLen; ++i) {
          double z = 0.0;
          std::vector<double> row(i + 1);
          for (std::size_t j = 0; j <= i; ++j) {
            row[j] = std::exp(static_cast<std::int64_t>(j) == kAttnXrag ? bias : 0.0);
            z += row[j];
          }
          float* dst = inst.attention.data() + ((l * kAttnHeads + h) * kAttnLen + i) * kAttnLen;
          for (std::size_t j = 0; j <= i; ++j) dst[j] = static_cast<float>(row[j] / z);
        }
      }
    }
  }

  std::vector<std::string> words;
  for (int j = 0; j < inst.m; ++j) {
    std::string word = random_word(rng);
    while (judge_substring(kNoAnswer, {word})) word = random_word(rng);
    words.push_back(std::move(word));
  }
  std::lognormal_distribution<double> ppl(2.3, 0.25);

  InstanceRecord& r = inst.record;
  r.id = instance_id(index);
  const std::string entity_prefix = "entity-" + std::to_string(index) + "-";
  for (int j = 0; j < inst.m; ++j) {
    if (j) r.context += ' ';
    r.context += entity_prefix + std::to_string(j + 1) + " is linked to " + words[static_cast<std::size_t>(j)] + ".";
  }
  const std::string& answer = words[static_cast<std::size_t>(inst.target - 1)];
  r.question = "What is " + entity_prefix + std::to_string(inst.target) + " linked to?";
  r.answers = {answer};
  r.ref_output = "It is linked to " + answer + ".";
  r.comp_output = comp_correct ? *r.ref_output : std::string(kNoAnswer);
  r.ref_correct = true;
  r.comp_correct = comp_correct;
  r.token_count = whitespace_token_count(r.context);
  r.perplexity = ppl(rng);
  if (cfg.attention) {
    r.context_positions = std::vector<std::int64_t>{0, 1, 2};
    r.xrag_positions = std::vector<std::int64_t>{kAttnXrag};
    r.query_positions = std::vector<std::int64_t>{4, 5, 6, 7};
  }

  inst.vectors = {{"x_preproj", to_f32(x_pre)}, {"x_postproj", to_f32(x_post)}, {"x_mid", to_f32(x_mid)},
                  {"x_last", to_f32(x_last)},   {"q_preproj", to_f32(q_pre)},   {"q_postproj", to_f32(q_post)},
                  {"q_mid", to_f32(q_mid)},     {"q_last", to_f32(q_last)}};
  return inst;
}

SynthSummary generate_overflow_world(const SynthConfig& cfg, const fs::path& out_dir, std::size_t jobs) {
  cfg.validate();
  const fs::path tensor_dir = out_dir / "tensors";
  std::error_code ec;
  fs::create_directories(tensor_dir, ec);
  if (ec) throw IoError("cannot create " + tensor_dir.string() + ": " + ec.message());

  const std::size_t n = cfg.n_instances;
  std::vector<InstanceRecord> records(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        SynthInstance inst = generate_instance(cfg, i);
        InstanceRecord& r = inst.record;
        for (auto& [key, values] : inst.vectors) {
          const fs::path p = tensor_dir / (r.id + "." + key + ".ovt");
          write_tensor(Tensor::vector(std::move(values)), p);
          r.rep_paths[key] = p;
        }
        for (auto& [layer, rows_values] : inst.nonx) {
          const std::size_t rows = rows_values.first;
          const std::size_t cols = rows_values.second.size() / rows;
          const fs::path p = tensor_dir / (r.id + ".nonx_" + layer + ".ovt");
          write_tensor(Tensor({rows, cols}, std::move(rows_values.second)), p);
          r.nonx_paths[layer] = p;
        }
        if (!inst.attention.empty()) {
          const fs::path p = tensor_dir / (r.id + ".attn.ovt");
          write_tensor(Tensor({kAttnLayers, kAttnHeads, kAttnLen, kAttnLen}, std::move(inst.attention)), p);
          r.attn_path = p;
        }
        records[i] = std::move(r);
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

  SynthSummary s;
  s.n = n;
  for (const auto& r : records) s.positives += (r.ref_correct.value_or(false) && !r.comp_correct.value_or(true)) ? 1 : 0;
  s.manifest = out_dir / "manifest.jsonl";
  write_manifest(records, s.manifest);

  json meta;
  meta["config"] = json::parse(cfg.to_json());
  meta["config_digest"] = config_digest(cfg.to_json());
  meta["n"] = s.n;
  meta["positives"] = s.positives;
  meta["analytic_overflow_rate"] = analytic_overflow_rate(cfg);
  const fs::path tmp = out_dir / "synth.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << meta.dump(2) << '\n';
  }
  fs::rename(tmp, out_dir / "synth.json", ec);
  if (ec) throw IoError("cannot finalize synth.json: " + ec.message());
  return s;
}

TokenCorpus generate_token_type_corpus(const TokenCorpusConfig& cfg) {
  if (cfg.per_class == 0 || cfg.dim < 2) throw ConfigError("token corpus needs per_class >= 1 and dim >= 2");
  if (!(cfg.sparsity >= 0.0 && cfg.sparsity < 1.0)) throw ConfigError("token corpus sparsity must be in [0, 1)");
  const std::size_t n = 2 * cfg.per_class;
  TokenCorpus c;
  c.vectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cfg.dim));
  c.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = make_rng(cfg.seed, streams::kTokenCorpus, i);
    const bool dense = i < cfg.per_class;
    c.labels[i] = dense ? 1 : 0;
    auto row = c.vectors.row(static_cast<Eigen::Index>(i));
    if (dense) {
      std::normal_distribution<float> n01(0.0f, 1.0f);
      for (Eigen::Index j = 0; j < row.size(); ++j) row(j) = n01(rng);
      continue;
    }
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    bool any = false;
    for (Eigen::Index j = 0; j < row.size(); ++j) {
      if (u01(rng) < cfg.sparsity) {
        row(j) = 0.0f;
        continue;
      }
      const double mag = expo(rng);
      row(j) = static_cast<float>(u01(rng) < 0.5 ? -mag : mag);
      any = any || row(j) != 0.0f;
    }
    // A vector needs some mass for its statistics to exist.
    if (!any) row(0) = 1.0f;
  }
  return c;
}

}  // namespace overflow
