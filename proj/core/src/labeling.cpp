// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "overflow/labeling.hpp"

#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <atomic>
#include <optional>
#include <thread>

#include "overflow/error.hpp"

namespace overflow {

int overflow_label(bool ref_correct, bool comp_correct) { return (ref_correct && !comp_correct) ? 1 : 0; }

int overflow_label_threshold(double t_ref, double t_comp, double eps) {
  if (!(eps >= 0.0)) throw DomainError("overflow threshold eps must be >= 0");
  if (!(t_ref >= 0.0 && t_ref <= 1.0 && t_comp >= 0.0 && t_comp <= 1.0)) {
    throw DomainError("task metrics must lie in [0, 1]");
  }
  return (t_ref - t_comp >= eps) ? 1 : 0;
}

std::string normalize_answer(std::string_view text) {
  icu::UnicodeString folded =
      icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  folded.foldCase();

  icu::UnicodeString out;
  bool pending_space = false;
  for (int32_t i = 0; i < folded.length();) {
    const UChar32 c = folded.char32At(i);
    i += U16_LENGTH(c);
    if (u_isUWhiteSpace(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && out.length() > 0) out.append(static_cast<UChar>(u' '));
    pending_space = false;
    out.append(c);
  }
  std::string s;
  out.toUTF8String(s);
  return s;
}

bool judge_substring(std::string_view prediction, const std::vector<std::string>& answers,
                     const SubstringOptions& opts) {
  if (answers.empty()) throw DomainError("judge_substring: empty answer list");
  const std::string pred = opts.raw ? std::string(prediction) : normalize_answer(prediction);
  for (const auto& a : answers) {
    const std::string ans = opts.raw ? a : normalize_answer(a);
    if (ans.empty()) continue;
    if (pred.find(ans) != std::string::npos) return true;
  }
  return false;
}

JudgeMode parse_judge_mode(std::string_view s) {
  if (s == "manifest") return JudgeMode::manifest;
  if (s == "substring") return JudgeMode::substring;
  if (s == "external") return JudgeMode::external;
  throw ConfigError("unknown judge mode '" + std::string(s) + "'");
}

std::string_view to_string(JudgeMode m) {
  switch (m) {
    case JudgeMode::manifest:
      return "manifest";
    case JudgeMode::substring:
      return "substring";
    case JudgeMode::external:
      return "external";
  }
  return "?";
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::manifest:
      return "manifest";
    case Provenance::substring:
      return "substring";
    case Provenance::external:
      return "external";
  }
  return "?";
}

namespace {

enum class Outcome { ok, dropped, skipped, error };

struct Slot {
  Outcome outcome = Outcome::ok;
  std::optional<bool> ref;
  std::optional<bool> comp;
  bool used_judge = false;
  std::size_t external_ok = 0;
  std::string message;
};

// Resolves one correctness flag: manifest value if present, else the judge.
std::optional<bool> resolve_flag(const InstanceRecord& r, const std::optional<bool>& flag,
                                 const std::optional<std::string>& output, const char* which,
                                 const LabelingOptions& opts, Slot& slot) {
  if (flag) return flag;
  if (opts.mode == JudgeMode::manifest || !output) {
    slot.outcome = Outcome::error;
    slot.message = "instance '" + r.id + "': no " + which + "_correct flag and " +
                   (output ? std::string("judge mode is manifest") : std::string("no ") + which + "_output");
    return std::nullopt;
  }
  slot.used_judge = true;
  if (opts.mode == JudgeMode::substring) {
    if (r.answers.empty()) {
      slot.outcome = Outcome::error;
      slot.message = "instance '" + r.id + "': no reference answers to judge against";
      return std::nullopt;
    }
    return judge_substring(*output, r.answers, opts.substring);
  }
  try {
    const bool v = judge_external(opts.endpoint, r.question, r.answers, *output);
    ++slot.external_ok;
    return v;
  } catch (const JudgeUnavailableError& e) {
    slot.outcome = Outcome::skipped;
    slot.message = "instance '" + r.id + "': " + e.what();
  } catch (const JudgeProtocolError& e) {
    slot.outcome = Outcome::skipped;
    slot.message = "instance '" + r.id + "': " + e.what();
  }
  return std::nullopt;
}

void judge_record(const InstanceRecord& r, const LabelingOptions& opts, Slot& slot) {
  slot.ref = resolve_flag(r, r.ref_correct, r.ref_output, "ref", opts, slot);
  if (!slot.ref) return;
  if (!*slot.ref) {
    slot.outcome = Outcome::dropped;
    return;
  }
  slot.comp = resolve_flag(r, r.comp_correct, r.comp_output, "comp", opts, slot);
}

}  // namespace

LabeledDataset build_dataset(const std::vector<InstanceRecord>& records, const LabelingOptions& opts) {
  std::vector<Slot> slots(records.size());

  if (opts.mode == JudgeMode::external && opts.endpoint.max_in_flight > 1 && records.size() > 1) {
    // Bounded parallelism; results land in their own slot so completion order is irrelevant.
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < records.size(); i = next++) judge_record(records[i], opts, slots[i]);
    };
    const std::size_t n_workers = std::min(opts.endpoint.max_in_flight, records.size());
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  } else {
    for (std::size_t i = 0; i < records.size(); ++i) judge_record(records[i], opts, slots[i]);
  }

  LabeledDataset out;
  out.counts.total = records.size();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Slot& s = slots[i];
    out.counts.external_calls_ok += s.external_ok;
    switch (s.outcome) {
      case Outcome::dropped:
        ++out.counts.dropped;
        continue;
      case Outcome::skipped:
        ++out.counts.judge_skipped;
        out.messages.push_back(s.message);
        continue;
      case Outcome::error:
        ++out.counts.errors;
        out.messages.push_back(s.message);
        continue;
      case Outcome::ok:
        break;
    }
    LabeledInstance li;
    li.id = records[i].id;
    li.overflow = overflow_label(*s.ref, *s.comp);
    li.provenance = !s.used_judge ? Provenance::manifest
                                  : (opts.mode == JudgeMode::external ? Provenance::external : Provenance::substring);
    li.record = records[i];
    li.record.ref_correct = *s.ref;
    li.record.comp_correct = *s.comp;
    li.record.overflow = li.overflow;
    li.record.judge = std::string(to_string(li.provenance));
    out.counts.positives += static_cast<std::size_t>(li.overflow);
    out.instances.push_back(std::move(li));
  }
  out.counts.kept = out.instances.size();
  return out;
}

}  // namespace overflow
