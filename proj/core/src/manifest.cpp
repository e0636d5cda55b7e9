// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "overflow/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_set>

#include "json.hpp"
#include "overflow/error.hpp"
#include "overflow/tensor_io.hpp"

namespace overflow {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

template <typename T>
std::optional<T> opt_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::string relativize(const fs::path& base, const fs::path& p) {
  const fs::path abs = fs::absolute(p).lexically_normal();
  const fs::path rel = abs.lexically_relative(base.lexically_normal());
  if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  return abs.generic_string();
}

template <std::size_t N>
bool is_one_of(const std::string& key, const std::array<std::string_view, N>& allowed) {
  return std::find(allowed.begin(), allowed.end(), key) != allowed.end();
}

InstanceRecord parse_record(const json& j, const fs::path& base) {
  InstanceRecord r;
  r.id = j.at("id").get<std::string>();
  r.question = j.value("question", "");
  r.context = j.value("context", "");
  r.answers = j.value("answers", std::vector<std::string>{});
  r.ref_output = opt_field<std::string>(j, "ref_output");
  r.comp_output = opt_field<std::string>(j, "comp_output");
  r.ref_correct = opt_field<bool>(j, "ref_correct");
  r.comp_correct = opt_field<bool>(j, "comp_correct");
  r.token_count = opt_field<std::int64_t>(j, "token_count");
  r.perplexity = opt_field<double>(j, "perplexity");
  if (auto it = j.find("rep_paths"); it != j.end() && !it->is_null()) {
    for (const auto& [k, v] : it->items()) {
      if (!is_one_of(k, kRepStages)) throw FormatError("unknown rep_paths stage '" + k + "'");
      r.rep_paths[k] = resolve(base, v.get<std::string>());
    }
  }
  if (auto it = j.find("nonx_paths"); it != j.end() && !it->is_null()) {
    for (const auto& [k, v] : it->items()) {
      if (!is_one_of(k, kLayerKeys)) throw FormatError("unknown nonx_paths layer '" + k + "'");
      r.nonx_paths[k] = resolve(base, v.get<std::string>());
    }
  }
  if (auto p = opt_field<std::string>(j, "attn_path")) r.attn_path = resolve(base, *p);
  r.xrag_positions = opt_field<std::vector<std::int64_t>>(j, "xrag_positions");
  r.query_positions = opt_field<std::vector<std::int64_t>>(j, "query_positions");
  r.context_positions = opt_field<std::vector<std::int64_t>>(j, "context_positions");
  r.overflow = opt_field<int>(j, "overflow");
  r.judge = opt_field<std::string>(j, "judge");
  return r;
}

json to_json(const InstanceRecord& r, const fs::path& base) {
  json j;
  j["id"] = r.id;
  j["question"] = r.question;
  j["context"] = r.context;
  j["answers"] = r.answers;
  if (r.ref_output) j["ref_output"] = *r.ref_output;
  if (r.comp_output) j["comp_output"] = *r.comp_output;
  if (r.ref_correct) j["ref_correct"] = *r.ref_correct;
  if (r.comp_correct) j["comp_correct"] = *r.comp_correct;
  if (r.token_count) j["token_count"] = *r.token_count;
  if (r.perplexity) j["perplexity"] = *r.perplexity;
  if (!r.rep_paths.empty()) {
    json m = json::object();
    for (const auto& [k, p] : r.rep_paths) m[k] = relativize(base, p);
    j["rep_paths"] = std::move(m);
  }
  if (!r.nonx_paths.empty()) {
    json m = json::object();
    for (const auto& [k, p] : r.nonx_paths) m[k] = relativize(base, p);
    j["nonx_paths"] = std::move(m);
  }
  if (r.attn_path) j["attn_path"] = relativize(base, *r.attn_path);
  if (r.xrag_positions) j["xrag_positions"] = *r.xrag_positions;
  if (r.query_positions) j["query_positions"] = *r.query_positions;
  if (r.context_positions) j["context_positions"] = *r.context_positions;
  if (r.overflow) j["overflow"] = *r.overflow;
  if (r.judge) j["judge"] = *r.judge;
  return j;
}

}  // namespace

void validate_record(const InstanceRecord& r) {
  const std::string who = "instance '" + r.id + "': ";
  if (r.id.empty()) throw FormatError("record with empty id");
  if (r.token_count && *r.token_count < 1) throw FormatError(who + "token_count must be >= 1");
  if (r.perplexity && !(*r.perplexity > 0.0)) throw FormatError(who + "perplexity must be > 0");

  std::set<std::int64_t> seen;
  for (const auto* list : {&r.xrag_positions, &r.query_positions, &r.context_positions}) {
    if (!*list) continue;
    std::set<std::int64_t> mine;
    for (auto p : **list) {
      if (p < 0) throw FormatError(who + "negative position index");
      if (!mine.insert(p).second) continue;
      if (seen.count(p)) throw FormatError(who + "position lists are not disjoint (index " + std::to_string(p) + ")");
    }
    seen.insert(mine.begin(), mine.end());
  }
}

void validate_record_tensors(const InstanceRecord& r) {
  const std::string who = "instance '" + r.id + "': ";
  for (const auto& [stage, p] : r.rep_paths) {
    if (read_tensor(p).rank() != 1) throw FormatError(who + stage + " must be a rank-1 tensor");
  }
  for (const auto& [layer, p] : r.nonx_paths) {
    if (read_tensor(p).rank() != 2) throw FormatError(who + "nonx " + layer + " must be a rank-2 tensor");
  }
  if (r.attn_path) {
    const Tensor a = read_tensor(*r.attn_path);
    if (a.rank() != 4) throw FormatError(who + "attention must be a rank-4 tensor");
    const auto seq = static_cast<std::int64_t>(a.dim(2));
    for (const auto* list : {&r.xrag_positions, &r.query_positions, &r.context_positions}) {
      if (!*list) continue;
      for (auto p : **list) {
        if (p >= seq) throw FormatError(who + "position " + std::to_string(p) + " outside [0, " + std::to_string(seq) + ")");
      }
    }
  }
}

std::vector<InstanceRecord> read_manifest(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open manifest '" + path.string() + "'");
  const fs::path base = fs::absolute(path).parent_path();

  std::vector<InstanceRecord> out;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno) + ": ";
    InstanceRecord rec;
    try {
      rec = parse_record(json::parse(line), base);
      validate_record(rec);
    } catch (const json::exception& e) {
      throw FormatError(where + "malformed record (line " + std::to_string(lineno) + "): " + e.what());
    } catch (const FormatError& e) {
      throw FormatError(where + e.what());
    }
    if (!ids.insert(rec.id).second) throw FormatError(where + "duplicate id '" + rec.id + "'");
    out.push_back(std::move(rec));
  }
  return out;
}

void write_manifest(const std::vector<InstanceRecord>& records, const fs::path& path) {
  const fs::path base = fs::absolute(path).parent_path();
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) throw IoError("cannot open '" + tmp.string() + "' for writing");
    for (const auto& r : records) os << to_json(r, base).dump() << '\n';
    if (!os) throw IoError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

}  // namespace overflow
