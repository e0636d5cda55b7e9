// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "overflow/digest.hpp"
#include "overflow/error.hpp"
#include "overflow/experiment.hpp"
#include "overflow/features.hpp"
#include "overflow/labeling.hpp"
#include "overflow/manifest.hpp"
#include "overflow/probes/model.hpp"
#include "overflow/report.hpp"
#include "overflow/synthetic.hpp"
#include "overflow/tensor_io.hpp"

namespace overflow::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Raised for command-line mistakes that CLI11 cannot catch itself.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Every external judge call failed.
struct JudgeDown : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_seed_jobs(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.seed,
                  "Root seed (flag > config file > OVERFLOW_PROBE_SEED > 7)");
  sub->add_option("--jobs", o.jobs, "Worker threads (default: number of cores)")->check(CLI::PositiveNumber);
}

void add_judge(CLI::App* sub, Options& o) {
  sub->add_option("--judge", o.judge, "Correctness source for missing flags")
      ->check(CLI::IsMember({"manifest", "substring", "external"}))
      ->capture_default_str();
  sub->add_option("--judge-url", o.judge_url, "HTTP(S) endpoint of the external judge");
  sub->add_option("--timeout-s", o.timeout_s, "Per-attempt timeout of the external judge in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--max-in-flight", o.max_in_flight, "Concurrent external judge requests")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_flag("--raw-substring", o.raw_substring, "Byte-exact substring matching (no casefold or whitespace folding)");
}

void add_probe(CLI::App* sub, Options& o) {
  sub->add_option("--probe", o.probe,
                  "Probe architecture (default: logistic for hand-crafted sets, linear for representations)")
      ->check(CLI::IsMember({"logistic", "linear", "mlp", "mlp_scl"}));
  sub->add_option("--max-epochs", o.max_epochs, "Override the architecture's epoch budget")->check(CLI::PositiveNumber);
  sub->add_option("--hidden-dim", o.hidden_dim, "Override the hidden width (mlp, mlp_scl)")->check(CLI::PositiveNumber);
  sub->add_option("--batch-size", o.batch_size, "Override the minibatch size")->check(CLI::PositiveNumber);
  sub->add_option("--patience", o.patience, "Override the early-stopping patience")->check(CLI::PositiveNumber);
  sub->add_option("--learning-rate", o.learning_rate, "Override the Adam learning rate")->check(CLI::PositiveNumber);
  sub->add_option("--lambda-l2", o.lambda_l2, "Override the L2 penalty weight")->check(CLI::NonNegativeNumber);
  sub->add_option("--lambda-l1", o.lambda_l1, "Override the L1 penalty weight")->check(CLI::NonNegativeNumber);
}

void add_feature_opts(CLI::App* sub, Options& o) {
  sub->add_flag("--whitespace-token-fallback", o.whitespace_fallback,
                "Count whitespace tokens when a record lacks token_count (flagged in outputs)");
  sub->add_option("--level", o.level, "DEFLATE level for the compressibility ratio")
      ->check(CLI::Range(0, 9))
      ->capture_default_str();
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

void apply_section(CLI::App& app, const json& section, bool strict) {
  for (const auto& [key, val] : section.items()) {
    if (val.is_object()) continue;
    CLI::Option* opt = app.get_option_no_throw("--" + key);
    if (!opt) {
      if (strict) throw UsageError("config key '" + key + "' is not an option of '" + app.get_name() + "'");
      continue;
    }
    if (opt->count() > 0) continue;
    if (val.is_array()) {
      for (const auto& item : val) opt->add_result(scalar_text(item));
    } else {
      opt->add_result(scalar_text(val));
    }
    opt->run_callback();
  }
}

/// Subcommand section first, then shared top-level keys; flags given on the
/// command line are never overwritten.
void merge_config(CLI::App& sub, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config file '" + path + "' must hold a JSON object");
  if (cfg.contains(sub.get_name())) {
    const json& section = cfg.at(sub.get_name());
    if (!section.is_object()) throw UsageError("config section '" + sub.get_name() + "' must be an object");
    apply_section(sub, section, true);
  }
  apply_section(sub, cfg, false);
}

void resolve_seed(CLI::App& sub, Options& o) {
  if (!sub.get_option_no_throw("--seed") || sub.count("--seed") > 0) return;
  if (const char* env = std::getenv("OVERFLOW_PROBE_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      o.seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("OVERFLOW_PROBE_SEED is not an unsigned integer: '") + env + "'");
    }
  }
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

void write_text(const fs::path& path, const std::string& text) {
  const fs::path tmp = fs::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + tmp.string() + "' for writing");
    os << text;
    if (!os) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "': " + ec.message());
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

LabelingOptions labeling_options(const Options& o) {
  LabelingOptions lo;
  lo.mode = parse_judge_mode(o.judge);
  lo.substring.raw = o.raw_substring;
  lo.endpoint.url = o.judge_url;
  lo.endpoint.timeout_s = o.timeout_s;
  lo.endpoint.max_in_flight = o.max_in_flight;
  if (lo.mode == JudgeMode::external && lo.endpoint.url.empty()) {
    throw UsageError("--judge external requires --judge-url");
  }
  return lo;
}

void report_labeling(const LabeledDataset& ds, JudgeMode mode, std::ostream& err) {
  for (const auto& m : ds.messages) err << "warning: " << m << '\n';
  const auto& c = ds.counts;
  err << "labeled: total " << c.total << ", kept " << c.kept << ", dropped " << c.dropped << ", judge-skipped "
      << c.judge_skipped << ", errors " << c.errors << ", positives " << c.positives << '\n';
  if (c.single_class()) err << "warning: labeled set contains a single class\n";
  if (mode == JudgeMode::external && c.external_calls_ok == 0 && c.judge_skipped > 0) {
    throw JudgeDown("external judge unavailable: all " + std::to_string(c.judge_skipped) +
                    " judged records failed");
  }
}

FeatureOptions feature_options(const Options& o) {
  FeatureOptions fo;
  fo.complexity.allow_whitespace_token_fallback = o.whitespace_fallback;
  fo.complexity.compressor.level = o.level;
  return fo;
}

std::string features_digest(Stage stage, FeatureSet fs_, const FeatureOptions& fo) {
  json j;
  j["stage"] = std::string(to_string(stage));
  j["feature_set"] = std::string(to_string(fs_));
  j["compressor"] = {{"codec", fo.complexity.compressor.codec}, {"level", fo.complexity.compressor.level}};
  j["whitespace_token_fallback"] = fo.complexity.allow_whitespace_token_fallback;
  return config_digest(j.dump());
}

void warn_features(const FeatureMatrix& fm, std::ostream& err) {
  if (fm.token_count_fallbacks) {
    err << "warning: " << fm.token_count_fallbacks << " record(s) used the whitespace token-count fallback\n";
  }
  if (fm.ratio_capped) err << "warning: " << fm.ratio_capped << " attention ratio cell(s) capped\n";
  if (fm.rows_off_simplex) err << "warning: " << fm.rows_off_simplex << " attention row(s) do not sum to 1\n";
}

ProbeConfig probe_config(const Options& o, const CLI::App& sub, FeatureSet fs_) {
  ProbeConfig pc = o.probe.empty() ? default_probe_config(fs_) : ProbeConfig::defaults(parse_architecture(o.probe));
  if (sub.count("--max-epochs")) pc.max_epochs = o.max_epochs;
  if (sub.count("--hidden-dim")) pc.hidden_dim = o.hidden_dim;
  if (sub.count("--batch-size")) pc.batch_size = o.batch_size;
  if (sub.count("--patience")) pc.patience = o.patience;
  if (sub.count("--learning-rate")) pc.learning_rate = o.learning_rate;
  if (sub.count("--lambda-l2")) pc.lambda_l2 = o.lambda_l2;
  if (sub.count("--lambda-l1")) pc.lambda_l1 = o.lambda_l1;
  pc.seed = o.seed;
  pc.validate();
  return pc;
}

struct LabeledMatrix {
  FeatureMatrix fm;
  std::vector<int> y;
};

/// Joins a feature cache with a labeled manifest by instance id.
LabeledMatrix join_cache(const Options& o) {
  LabeledMatrix out;
  FeatureMatrix all = load_feature_cache(o.cache);
  std::map<std::string, int> label_of;
  for (const auto& r : read_manifest(o.labels)) {
    if (!r.overflow) throw FormatError("labels '" + o.labels + "': record '" + r.id + "' has no overflow label");
    label_of[r.id] = *r.overflow;
  }
  std::map<std::string, Eigen::Index> row_of;
  for (std::size_t i = 0; i < all.ids.size(); ++i) row_of[all.ids[i]] = static_cast<Eigen::Index>(i);
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < all.ids.size(); ++i) {
    const auto it = label_of.find(all.ids[i]);
    if (it == label_of.end()) continue;
    rows.push_back(static_cast<Eigen::Index>(i));
    out.y.push_back(it->second);
  }
  for (const auto& [id, _] : label_of) {
    if (!row_of.count(id)) throw FormatError("instance '" + id + "': labeled but absent from feature cache '" + o.cache + "'");
  }
  out.fm = all;
  out.fm.ids.clear();
  out.fm.x.resize(static_cast<Eigen::Index>(rows.size()), all.x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.fm.x.row(static_cast<Eigen::Index>(i)) = all.x.row(rows[i]);
    out.fm.ids.push_back(all.ids[static_cast<std::size_t>(rows[i])]);
  }
  return out;
}

int cmd_synth(const Options& o, const CLI::App& sub, std::ostream& out) {
  require(o.out, "--out");
  const fs::path dir(o.out);
  make_dir(dir);
  if (o.preset == "token-type") {
    TokenCorpusConfig tc;
    tc.per_class = o.per_class;
    tc.dim = o.dim;
    tc.seed = o.seed;
    const TokenCorpus c = generate_token_type_corpus(tc);
    const auto n = static_cast<std::size_t>(c.vectors.rows());
    const auto d = static_cast<std::size_t>(c.vectors.cols());
    write_tensor(Tensor({n, d}, std::vector<float>(c.vectors.data(), c.vectors.data() + c.vectors.size())),
                 dir / "tokens.ovt");
    write_tensor(Tensor::vector(std::vector<double>(c.labels.begin(), c.labels.end())), dir / "tokens.labels.ovt");
    json meta;
    meta["config"] = {{"per_class", tc.per_class}, {"dim", tc.dim}, {"sparsity", tc.sparsity}, {"seed", tc.seed}};
    meta["config_digest"] = config_digest(meta["config"].dump());
    meta["labels"] = "1 = dense (compressed-like), 0 = sparse heavy-tailed";
    write_text(dir / "tokens.json", meta.dump(2) + "\n");
    out << "token-type corpus: " << n << " vectors of dimension " << d << '\n';
    return kOk;
  }

  SynthConfig sc = SynthConfig::from_preset(o.preset);
  sc.seed = o.seed;
  if (sub.count("--n-instances")) sc.n_instances = o.n_instances;
  if (sub.count("--capacity")) sc.capacity = o.capacity;
  if (sub.count("--m-min")) sc.m_min = o.m_min;
  if (sub.count("--m-max")) sc.m_max = o.m_max;
  if (sub.count("--fact-dim")) sc.fact_dim = o.fact_dim;
  if (sub.count("--compressed-dim")) sc.compressed_dim = o.compressed_dim;
  if (sub.count("--noise-sigma")) sc.noise_sigma = o.noise_sigma;
  if (sub.count("--label-noise")) sc.label_noise = o.label_noise;
  if (o.no_attention) sc.attention = false;
  const SynthSummary s = generate_overflow_world(sc, dir, o.jobs);
  out << "synthetic world '" << sc.preset << "': " << s.n << " instances, " << s.positives
      << " overflow positives (analytic rate " << analytic_overflow_rate(sc) << ")\n"
      << "manifest: " << s.manifest.string() << '\n';
  return kOk;
}

int cmd_features(const Options& o, std::ostream& out, std::ostream& err) {
  require(o.manifest, "--manifest");
  require(o.stage, "--stage");
  require(o.feature_set, "--features");
  require(o.out, "--out");
  const Stage stage = parse_stage(o.stage);
  const FeatureSet fs_ = parse_feature_set(o.feature_set);
  require_valid_combination(stage, fs_);
  const FeatureOptions fo = feature_options(o);
  const auto records = read_manifest(o.manifest);
  const FeatureMatrix fm = build_feature_matrix(records, stage, fs_, fo, o.jobs);
  warn_features(fm, err);
  const fs::path path(o.out);
  if (path.has_parent_path()) make_dir(path.parent_path());
  save_feature_cache(fm, path, features_digest(stage, fs_, fo));
  out << "features: " << fm.x.rows() << " x " << fm.x.cols() << " (" << o.stage << ", " << o.feature_set
      << ") -> " << path.string() << '\n';
  return kOk;
}

int cmd_label(const Options& o, std::ostream& out, std::ostream& err) {
  require(o.manifest, "--manifest");
  require(o.out, "--out");
  const LabelingOptions lo = labeling_options(o);
  const auto records = read_manifest(o.manifest);
  const LabeledDataset ds = build_dataset(records, lo);
  std::vector<InstanceRecord> labeled;
  for (const auto& li : ds.instances) labeled.push_back(li.record);
  const fs::path path(o.out);
  if (path.has_parent_path()) make_dir(path.parent_path());
  write_manifest(labeled, path);

  json meta;
  meta["judge"] = o.judge;
  meta["raw_substring"] = o.raw_substring;
  meta["config_digest"] = config_digest(meta.dump());
  const auto& c = ds.counts;
  meta["counts"] = {{"total", c.total},   {"kept", c.kept},     {"dropped", c.dropped},
                    {"judge_skipped", c.judge_skipped}, {"errors", c.errors}, {"positives", c.positives},
                    {"external_calls_ok", c.external_calls_ok}};
  write_text(fs::path(path.string() + ".counts.json"), meta.dump(2) + "\n");
  report_labeling(ds, lo.mode, err);
  out << "labeled manifest: " << path.string() << " (" << c.kept << " instances, " << c.positives
      << " positives)\n";
  return kOk;
}

int cmd_train(const Options& o, const CLI::App& sub, std::ostream& out) {
  require(o.cache, "--cache");
  require(o.labels, "--labels");
  require(o.out, "--out");
  const LabeledMatrix lm = join_cache(o);
  const ProbeConfig pc = probe_config(o, sub, lm.fm.feature_set);
  const ProbeModel m = fit_probe(lm.fm.x, lm.y, pc);
  save_model(m, o.out);
  out << "model: " << to_string(pc.architecture) << " on " << lm.fm.x.rows() << " x " << lm.fm.x.cols()
      << ", digest " << m.config_digest << " -> " << o.out << '\n';
  return kOk;
}

int cmd_eval(const Options& o, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  require(o.out, "--out");
  if (o.cache.empty() == o.manifest.empty()) throw UsageError("eval needs exactly one of --manifest or --cache");

  Eigen::MatrixXd x;
  std::vector<int> y;
  Stage stage;
  FeatureSet fs_;
  const FeatureOptions fo = feature_options(o);
  const JudgeMode mode = parse_judge_mode(o.judge);
  if (!o.manifest.empty()) {
    require(o.stage, "--stage");
    require(o.feature_set, "--features");
    stage = parse_stage(o.stage);
    fs_ = parse_feature_set(o.feature_set);
    require_valid_combination(stage, fs_);
    const LabelingOptions lo = labeling_options(o);
    const LabeledDataset ds = build_dataset(read_manifest(o.manifest), lo);
    report_labeling(ds, lo.mode, err);
    std::vector<InstanceRecord> kept;
    for (const auto& li : ds.instances) {
      kept.push_back(li.record);
      y.push_back(li.overflow);
    }
    FeatureMatrix fm = build_feature_matrix(kept, stage, fs_, fo, o.jobs);
    warn_features(fm, err);
    x = std::move(fm.x);
  } else {
    require(o.labels, "--labels");
    LabeledMatrix lm = join_cache(o);
    stage = lm.fm.stage;
    fs_ = lm.fm.feature_set;
    if (!o.stage.empty() && parse_stage(o.stage) != stage) {
      throw UsageError("--stage " + o.stage + " does not match the cache's stage " + std::string(to_string(stage)));
    }
    if (!o.feature_set.empty() && parse_feature_set(o.feature_set) != fs_) {
      throw UsageError("--features " + o.feature_set + " does not match the cache's feature set " +
                       std::string(to_string(fs_)));
    }
    x = std::move(lm.fm.x);
    y = std::move(lm.y);
  }

  ExperimentConfig ec;
  ec.stage = stage;
  ec.feature_set = fs_;
  ec.probe = probe_config(o, sub, fs_);
  ec.folds = o.folds;
  ec.seed = o.seed;
  ec.dataset = o.dataset;
  ec.compressor = fo.complexity.compressor;
  ec.judge = mode;
  const EvalReport r = run_experiment(x, y, ec, o.jobs);

  const fs::path dir(o.out);
  make_dir(dir);
  write_text(dir / "report.json", report_to_json(r));
  const std::string text = report_to_text(r);
  write_text(dir / "report.txt", text);
  write_text(dir / "folds.csv", folds_csv(r));
  out << text;
  return kOk;
}

int cmd_report(const Options& o, std::ostream& out) {
  if (o.reports.empty()) throw UsageError("report needs at least one report.json");
  std::vector<EvalReport> reports;
  for (const auto& p : o.reports) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open report '" + p + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      reports.push_back(report_from_json(ss.str()));
    } catch (const FormatError& e) {
      throw FormatError("report '" + p + "': " + e.what());
    }
  }
  const ReportGrid g = build_grid(reports);
  const std::string text = grid_to_text(g);
  if (!o.out.empty()) {
    const fs::path dir(o.out);
    make_dir(dir);
    write_text(dir / "grid.json", grid_to_json(g));
    write_text(dir / "grid.md", text);
  }
  out << text;
  return kOk;
}

}  // namespace

std::unique_ptr<CLI::App> build_app(Options& o) {
  auto app = std::make_unique<CLI::App>("Token-overflow detection toolkit for soft context compression",
                                        "overflow-probe");
  app->require_subcommand(1);
  app->option_defaults()->always_capture_default(false);
  app->add_option("--config", o.config_path,
                  "JSON config; a section named after the subcommand overrides shared top-level keys, flags win");

  CLI::App* synth = app->add_subcommand("synth", "Generate a synthetic overflow world or token-type corpus");
  synth->add_option("--preset", o.preset, "paper-mini, tiny or token-type")
      ->check(CLI::IsMember({"paper-mini", "tiny", "token-type"}))
      ->capture_default_str();
  synth->add_option("--out", o.out, "Output directory");
  add_seed_jobs(synth, o);
  synth->add_option("--n-instances", o.n_instances, "Number of instances")->check(CLI::PositiveNumber);
  synth->add_option("--capacity", o.capacity, "Facts that survive compression")->check(CLI::PositiveNumber);
  synth->add_option("--m-min", o.m_min, "Fewest facts per context")->check(CLI::PositiveNumber);
  synth->add_option("--m-max", o.m_max, "Most facts per context")->check(CLI::PositiveNumber);
  synth->add_option("--fact-dim", o.fact_dim, "Retriever-space dimension")->check(CLI::PositiveNumber);
  synth->add_option("--compressed-dim", o.compressed_dim, "LLM-space dimension")->check(CLI::PositiveNumber);
  synth->add_option("--noise-sigma", o.noise_sigma, "Gaussian noise on projected vectors")->check(CLI::NonNegativeNumber);
  synth->add_option("--label-noise", o.label_noise, "Probability of flipping the compressed run's correctness")
      ->check(CLI::Range(0.0, 0.2));
  synth->add_flag("--no-attention", o.no_attention, "Skip the synthetic attention tensors");
  synth->add_option("--per-class", o.per_class, "Vectors per class (token-type)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth->add_option("--dim", o.dim, "Vector dimension (token-type)")->check(CLI::Range(2, 1 << 20))->capture_default_str();

  CLI::App* features = app->add_subcommand("features", "Compose a feature matrix and cache it");
  features->add_option("--manifest", o.manifest, "Input JSONL manifest");
  features->add_option("--stage", o.stage, "Extraction stage");
  features->add_option("--features", o.feature_set, "Feature set");
  features->add_option("--out", o.out, "Output OVT path (a .json sidecar is written next to it)");
  add_feature_opts(features, o);
  add_seed_jobs(features, o);

  CLI::App* label = app->add_subcommand("label", "Judge correctness and write an overflow-labeled manifest");
  label->add_option("--manifest", o.manifest, "Input JSONL manifest");
  label->add_option("--out", o.out, "Output labeled manifest");
  add_judge(label, o);

  CLI::App* train = app->add_subcommand("train", "Train one probe on a cached feature matrix");
  train->add_option("--cache", o.cache, "Feature cache written by `features`");
  train->add_option("--labels", o.labels, "Labeled manifest written by `label`");
  train->add_option("--out", o.out, "Model output directory");
  add_probe(train, o);
  add_seed_jobs(train, o);

  CLI::App* eval = app->add_subcommand("eval", "Stratified k-fold ROC-AUC evaluation");
  eval->add_option("--manifest", o.manifest, "Manifest to label and featurize on the fly");
  eval->add_option("--cache", o.cache, "Feature cache (instead of --manifest)");
  eval->add_option("--labels", o.labels, "Labeled manifest matching --cache");
  eval->add_option("--stage", o.stage, "Extraction stage");
  eval->add_option("--features", o.feature_set, "Feature set");
  eval->add_option("--folds", o.folds, "Number of stratified folds")->check(CLI::Range(2, 100))->capture_default_str();
  eval->add_option("--dataset", o.dataset, "Dataset label echoed into the report")->capture_default_str();
  eval->add_option("--out", o.out, "Output directory for report.json, report.txt and folds.csv");
  add_probe(eval, o);
  add_judge(eval, o);
  add_feature_opts(eval, o);
  add_seed_jobs(eval, o);

  CLI::App* report = app->add_subcommand("report", "Combine report.json files into a stage x feature-set grid");
  report->add_option("reports", o.reports, "report.json files");
  report->add_option("--out", o.out, "Directory for grid.json and grid.md");

  return app;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  o.jobs = std::max(1u, std::thread::hardware_concurrency());
  auto app = build_app(o);
  try {
    app->parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app->exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  CLI::App* sub = app->get_subcommands().front();
  try {
    if (!o.config_path.empty()) merge_config(*sub, o.config_path);
    resolve_seed(*sub, o);
    const std::string name = sub->get_name();
    if (name == "synth") return cmd_synth(o, *sub, out);
    if (name == "features") return cmd_features(o, out, err);
    if (name == "label") return cmd_label(o, out, err);
    if (name == "train") return cmd_train(o, *sub, out);
    if (name == "eval") return cmd_eval(o, *sub, out, err);
    if (name == "report") return cmd_report(o, out);
    err << "error: unknown subcommand '" << name << "'\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const JudgeDown& e) {
    err << "error: " << e.what() << '\n';
    return kJudgeUnavailable;
  } catch (const JudgeUnavailableError& e) {
    err << "error: " << e.what() << '\n';
    return kJudgeUnavailable;
  } catch (const SingleClassError& e) {
    err << "error: single-class labels: " << e.what() << '\n';
    return kData;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
}

}  // namespace overflow::cli
