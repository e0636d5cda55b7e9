// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "overflow/dct.hpp"
#include "overflow/experiment.hpp"
#include "overflow/features.hpp"
#include "overflow/folds.hpp"
#include "overflow/labeling.hpp"
#include "overflow/manifest.hpp"
#include "overflow/probes/logistic.hpp"
#include "overflow/probes/model.hpp"
#include "overflow/roc_auc.hpp"
#include "overflow/saturation.hpp"
#include "overflow/synthetic.hpp"

using namespace overflow;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<double>> stat_vectors() {
  std::mt19937_64 rng(20261019);
  std::normal_distribution<double> g;
  std::exponential_distribution<double> ex(1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> out;
  for (std::size_t d : {2u, 8u, 257u, 4096u}) {
    for (int i = 0; i < 250; ++i) {
      std::vector<double> v(d);
      do {
        for (auto& x : v) {
          switch (i % 4) {
            case 0: x = g(rng); break;
            case 1: x = (u(rng) < 0.5 ? -1 : 1) * ex(rng); break;  // Laplace
            case 2: x = u(rng) < 0.1 ? 10.0 * g(rng) : 0.0; break;  // sparse
            default: x = 3.0 + u(rng); break;                       // offset uniform
          }
        }
      } while (std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; }));
      out.push_back(std::move(v));
    }
  }
  return out;
}

Verdict statistic_oracles(const std::vector<std::vector<double>>& vs) {
  const auto t0 = Clock::now();
  double worst = 0, worst_inv = 0;
  for (const auto& v : vs) {
    const auto p = saturation_profile(v);
    worst = std::max({worst, std::abs(p.hoyer - oracle::hoyer(v)),
                      std::abs(p.spectral_entropy - oracle::spectral_entropy(v)),
                      std::abs(p.excess_kurtosis - oracle::excess_kurtosis(v))});
    for (double c : {0.37, -2.5, 1e3}) {
      std::vector<double> w(v);
      for (auto& x : w) x *= c;
      const auto q = saturation_profile(w);
      worst_inv = std::max({worst_inv, std::abs(q.hoyer - p.hoyer), std::abs(q.spectral_entropy - p.spectral_entropy),
                            std::abs(q.excess_kurtosis - p.excess_kurtosis)});
    }
    std::vector<double> s(v);
    for (auto& x : s) x += 5.3;
    worst_inv = std::max(worst_inv, std::abs(excess_kurtosis(s) - p.excess_kurtosis));
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-10 && worst_inv <= 1e-9 && t < 30.0,
          fmt("%zu vectors, max |lib - oracle| %.2e, max invariance drift %.2e, %.1f s", vs.size(), worst, worst_inv,
              t)};
}

Verdict parseval(const std::vector<std::vector<double>>& vs) {
  double worst = 0;
  for (const auto& v : vs) {
    const auto c = dct2(v);
    long double ein = 0, eout = 0;
    for (double x : v) ein += static_cast<long double>(x) * x;
    for (double x : c) eout += static_cast<long double>(x) * x;
    worst = std::max(worst, static_cast<double>(std::fabs(ein - eout) / ein));
  }
  return {worst <= 1e-9, fmt("%zu vectors, max relative energy error %.2e", vs.size(), worst)};
}

Verdict auc_oracle() {
  std::mt19937_64 rng(500);
  double worst = 0;
  std::size_t tied = 0;
  for (int inst = 0; inst < 500; ++inst) {
    const std::size_t n = 2 + rng() % 400;
    const int levels = inst % 3 == 0 ? 3 : (inst % 3 == 1 ? 20 : 1000000);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % static_cast<unsigned>(levels)) / 7.0;
      y[i] = static_cast<int>(rng() % 4 == 0);
    }
    y[0] = 1;
    y[n - 1] = 0;
    std::vector<double> sorted(s);
    std::sort(sorted.begin(), sorted.end());
    tied += std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
    worst = std::max(worst, std::abs(roc_auc(s, y) - oracle::pairwise_auc(s, y)));
  }
  return {worst <= 1e-12, fmt("500 instances (%zu with ties), max |diff| %.2e", tied, worst)};
}

Verdict gradient_checks() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2026);
  std::normal_distribution<double> g;
  std::bernoulli_distribution keep(0.9);
  std::ostringstream detail;
  bool ok = true;

  // Feature-based logistic regression.
  {
    double worst = 0;
    for (int b = 0; b < 20; ++b) {
      const Eigen::Index n = 16, d = 6;
      Eigen::MatrixXd x(n, d);
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = g(rng);
      std::vector<int> y(static_cast<std::size_t>(n));
      for (auto& v : y) v = static_cast<int>(rng() % 2);
      Eigen::VectorXd w(d);
      for (auto& v : w) v = g(rng);
      const double bias = g(rng), c = 0.5;
      Eigen::VectorXd gw;
      double gb = 0;
      logistic_objective(w, bias, x, y, c, &gw, &gb);
      long double diff = 0, scale = 0;
      const double h = 1e-4;
      for (Eigen::Index j = 0; j <= d; ++j) {
        Eigen::VectorXd wp = w, wm = w;
        double bp = bias, bm = bias;
        if (j < d) {
          wp(j) += h;
          wm(j) -= h;
        } else {
          bp += h;
          bm -= h;
        }
        const double fd = (logistic_objective(wp, bp, x, y, c) - logistic_objective(wm, bm, x, y, c)) / (2 * h);
        const double an = j < d ? gw(j) : gb;
        diff += static_cast<long double>(an - fd) * (an - fd);
        scale += static_cast<long double>(an) * an;
      }
      worst = std::max(worst, static_cast<double>(std::sqrt(diff / scale)));
    }
    ok = ok && worst < 1e-4;
    detail << fmt("logistic %.1e", worst);
  }

  // Neural probes: every coordinate at a reduced width, plus random
  // directional derivatives at the default width.
  for (Architecture a : {Architecture::linear, Architecture::mlp, Architecture::mlp_scl}) {
    ProbeConfig narrow = ProbeConfig::defaults(a);
    narrow.hidden_dim = 24;
    const ProbeConfig wide = ProbeConfig::defaults(a);
    double worst = 0, worst_dir = 0;
    for (int b = 0; b < 20; ++b) {
      const Eigen::Index n = 12, d = 8;
      Eigen::MatrixXd x(n, d);
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = g(rng);
      std::vector<int> y(static_cast<std::size_t>(n));
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<int>(i % 2 ? rng() % 2 : i % 4 == 0);
      const Mode mode = b % 2 ? Mode::train : Mode::inference;

      ProbeParams<double> p = init_params<double>(narrow, static_cast<std::size_t>(d), 100 + static_cast<unsigned>(b));
      oracle::keep_off_kink(p, 1e-3);
      DropoutMasks<double> masks;
      const bool with_masks = mode == Mode::train && narrow.dropout > 0;
      if (with_masks) {
        masks.input.resize(n, d);
        masks.hidden.resize(n, static_cast<Eigen::Index>(narrow.hidden_dim));
        for (Eigen::Index i = 0; i < masks.input.size(); ++i) masks.input(i) = keep(rng);
        for (Eigen::Index i = 0; i < masks.hidden.size(); ++i) masks.hidden(i) = keep(rng);
      }
      worst = std::max(worst,
                       oracle::check_gradient(p, x, y, narrow, mode, with_masks ? &masks : nullptr).rel_error);

      ProbeParams<double> q = init_params<double>(wide, static_cast<std::size_t>(d), 200 + static_cast<unsigned>(b));
      oracle::keep_off_kink(q, 1e-3);
      ProbeParams<double> grad;
      probe_objective<double>(q, x, y, wide, Mode::inference, nullptr, &grad);
      ProbeParams<double> dir = q.zeros_like();
      long double dot = 0;
      auto db = dir.blocks();
      const auto gb = std::as_const(grad).blocks();
      for (std::size_t k = 0; k < db.size(); ++k) {
        for (Eigen::Index i = 0; i < db[k]->size(); ++i) {
          db[k]->data()[i] = g(rng);
          dot += static_cast<long double>(db[k]->data()[i]) * gb[k]->data()[i];
        }
      }
      const double h = 1e-6;
      auto shifted = [&](double s) {
        ProbeParams<double> r = q;
        auto rb = r.blocks();
        const auto cb = std::as_const(dir).blocks();
        for (std::size_t k = 0; k < rb.size(); ++k) *rb[k] += s * *cb[k];
        return probe_objective<double>(r, x, y, wide, Mode::inference, nullptr, nullptr).total();
      };
      const double fd = (shifted(h) - shifted(-h)) / (2 * h);
      worst_dir = std::max(worst_dir, oracle::rel_err(static_cast<double>(dot), fd));
    }
    ok = ok && worst < 1e-4 && worst_dir < 1e-4;
    detail << fmt(", %s %.1e/%.1e", std::string(to_string(a)).c_str(), worst, worst_dir);
  }
  const double t = seconds_since(t0);
  ok = ok && t < 120.0;
  detail << fmt(" (20 batches each, %.1f s)", t);
  return {ok, detail.str()};
}

Verdict stratification() {
  std::mt19937_64 rng(200);
  int worst_pos = 0, worst_size = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 9);
    const std::size_t n = static_cast<std::size_t>(k) * 2 + rng() % 500;
    std::vector<int> y(n, 0);
    const double rate = 0.05 + 0.5 * static_cast<double>(rng() % 1000) / 1000.0;
    for (auto& v : y) v = static_cast<double>(rng() % 1000) / 1000.0 < rate;
    for (int i = 0; i < k; ++i) {
      y[static_cast<std::size_t>(i)] = 1;
      y[n - 1 - static_cast<std::size_t>(i)] = 0;
    }
    const auto f = stratified_folds(y, k, static_cast<std::uint64_t>(trial));
    std::vector<int> pos(static_cast<std::size_t>(k)), size(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i) {
      pos[static_cast<std::size_t>(f[i])] += y[i];
      ++size[static_cast<std::size_t>(f[i])];
    }
    worst_pos = std::max(worst_pos, *std::max_element(pos.begin(), pos.end()) - *std::min_element(pos.begin(), pos.end()));
    worst_size =
        std::max(worst_size, *std::max_element(size.begin(), size.end()) - *std::min_element(size.begin(), size.end()));
  }
  return {worst_pos <= 1 && worst_size <= 1,
          fmt("200 label vectors, max positive-count spread %d, max fold-size spread %d", worst_pos, worst_size)};
}

// ---------------------------------------------------------------------------

struct World {
  std::vector<InstanceRecord> kept;
  std::vector<int> y;
};

World paper_mini(const fs::path& dir) {
  SynthConfig c = SynthConfig::from_preset("paper-mini");
  c.seed = 7;
  const auto s = generate_overflow_world(c, dir, 1);
  const auto ds = build_dataset(read_manifest(s.manifest), {});
  World w;
  for (const auto& li : ds.instances) {
    w.kept.push_back(li.record);
    w.y.push_back(li.overflow);
  }
  return w;
}

double cv_auc(const World& w, Stage st, FeatureSet fs_, Architecture arch) {
  const FeatureMatrix fm = build_feature_matrix(w.kept, st, fs_, {}, 1);
  ExperimentConfig ec;
  ec.stage = st;
  ec.feature_set = fs_;
  ec.probe = ProbeConfig::defaults(arch);
  ec.seed = 7;
  return run_experiment(fm.x, w.y, ec, 1).mean_auc;
}

Verdict synthetic_hierarchy(const World& w, double* joint_out, double seconds_so_far) {
  const auto t0 = Clock::now();
  const double joint = cv_auc(w, Stage::pre_inference, FeatureSet::representation_joint, Architecture::linear);
  const double ctx = cv_auc(w, Stage::pre_compression, FeatureSet::context, Architecture::logistic);
  const double rep = cv_auc(w, Stage::pre_inference, FeatureSet::representation, Architecture::linear);
  const double sat = cv_auc(w, Stage::pre_inference, FeatureSet::saturation, Architecture::logistic);
  *joint_out = joint;
  const double context_only = std::max(ctx, rep);
  const double t = seconds_so_far + seconds_since(t0);
  return {joint >= 0.80 && joint - context_only >= 0.05 && sat <= 0.60 && t < 180.0,
          fmt("joint %.3f, context %.3f, representation %.3f, gap %.3f, saturation %.3f (%.1f s)", joint, ctx, rep,
              joint - context_only, sat, t)};
}

Verdict token_type() {
  const auto t0 = Clock::now();
  TokenCorpusConfig tc;
  tc.seed = 7;
  const TokenCorpus c = generate_token_type_corpus(tc);
  Eigen::MatrixXd x(c.vectors.rows(), 3);
  for (Eigen::Index i = 0; i < c.vectors.rows(); ++i) {
    std::vector<double> v(c.vectors.row(i).data(), c.vectors.row(i).data() + c.vectors.cols());
    const auto p = saturation_profile(v).as_array();
    for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = p[static_cast<std::size_t>(j)];
  }
  ExperimentConfig ec;
  ec.stage = Stage::pre_inference;
  ec.feature_set = FeatureSet::saturation;
  ec.probe = ProbeConfig::defaults(Architecture::logistic);
  const double auc = run_experiment(x, c.labels, ec, 1).mean_auc;
  const double t = seconds_since(t0);
  return {auc > 0.95 && t < 60.0, fmt("%zu vectors, logistic on 3 saturation features, AUC %.4f (%.1f s)",
                                       c.labels.size(), auc, t)};
}

Verdict classifier_ablation(const World& w, double linear_joint) {
  const auto t0 = Clock::now();
  const double mlp = cv_auc(w, Stage::pre_inference, FeatureSet::representation_joint, Architecture::mlp);

  // XOR on two coordinates: only the hidden layer can represent it.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::MatrixXd x(600, 2);
  std::vector<int> y(600);
  for (Eigen::Index i = 0; i < 600; ++i) {
    x(i, 0) = u(rng);
    x(i, 1) = u(rng);
    y[static_cast<std::size_t>(i)] = x(i, 0) * x(i, 1) > 0;
  }
  ExperimentConfig ec;
  ec.stage = Stage::pre_inference;
  ec.feature_set = FeatureSet::representation;
  ec.probe = ProbeConfig::defaults(Architecture::mlp);
  ec.probe.hidden_dim = 32;
  ec.probe.learning_rate = 1e-2;
  ec.probe.max_epochs = 300;
  ec.probe.patience = 50;
  ec.probe.batch_size = 64;
  ec.probe.lambda_l1 = 1e-3;
  ec.probe.lambda_l2 = 1e-3;
  const double xor_mlp = run_experiment(x, y, ec, 1).mean_auc;
  ec.probe.architecture = Architecture::linear;
  const double xor_lin = run_experiment(x, y, ec, 1).mean_auc;

  const double t = seconds_since(t0);
  return {std::abs(mlp - linear_joint) <= 0.05 && xor_mlp > xor_lin,
          fmt("representation_joint mlp %.3f vs linear %.3f (|diff| %.3f); XOR mlp %.3f vs linear %.3f (%.1f s)", mlp,
              linear_joint, std::abs(mlp - linear_joint), xor_mlp, xor_lin, t)};
}

// ---------------------------------------------------------------------------

int run_cli(std::vector<std::string> args, std::string* err_out) {
  args.insert(args.begin(), "overflow-probe");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = overflow::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_out) *err_out += err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

int pipeline(const fs::path& root, std::string* err) {
  const std::string w = (root / "world").string();
  const std::string lab = (root / "labeled.jsonl").string();
  const std::string cache = (root / "features.ovt").string();
  const std::vector<std::vector<std::string>> steps{
      {"synth", "--preset", "paper-mini", "--seed", "7", "--out", w},
      {"label", "--manifest", w + "/manifest.jsonl", "--out", lab},
      {"features", "--manifest", lab, "--stage", "pre_inference", "--features", "representation_joint", "--out",
       cache},
      {"train", "--cache", cache, "--labels", lab, "--seed", "7", "--out", (root / "model").string()},
      {"eval", "--cache", cache, "--labels", lab, "--seed", "7", "--dataset", "paper-mini", "--out",
       (root / "eval").string()}};
  for (const auto& args : steps) {
    if (const int code = run_cli(args, err); code != 0) return code;
  }
  return 0;
}

Verdict determinism() {
  const auto t0 = Clock::now();
  oracle::TempDir a("accept-a"), b("accept-b");
  std::string err;
  if (pipeline(a.path(), &err) != 0 || pipeline(b.path(), &err) != 0) return {false, "pipeline failed: " + err};
  std::size_t files = 0, differing = 0;
  std::string first_diff;
  for (const auto& e : fs::recursive_directory_iterator(a.path())) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), a.path());
    ++files;
    if (slurp(e.path()) != slurp(b.path() / rel)) {
      if (first_diff.empty()) first_diff = rel.string();
      ++differing;
    }
  }
  const bool reports_equal = slurp(a / "eval/report.json") == slurp(b / "eval/report.json") &&
                             !slurp(a / "eval/report.json").empty();
  return {reports_equal && differing == 0,
          fmt("%zu files compared, %zu differ%s%s (%.1f s)", files, differing, first_diff.empty() ? "" : ", first ",
              first_diff.c_str(), seconds_since(t0))};
}

Verdict label_consistency() {
  std::size_t cases = 0, mismatches = 0;
  const double tiny = std::numeric_limits<double>::denorm_min();
  const std::vector<double> eps_grid{tiny, std::numeric_limits<double>::epsilon(), 0.25, 0.5,
                                     std::nextafter(1.0, 0.0), 1.0};
  for (bool r : {false, true}) {
    for (bool c : {false, true}) {
      for (double eps : eps_grid) {
        ++cases;
        mismatches += overflow_label(r, c) != overflow_label_threshold(r ? 1.0 : 0.0, c ? 1.0 : 0.0, eps);
      }
    }
  }
  // Threshold boundaries: every pair on a grid, with eps hitting the gap exactly.
  const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
  for (double tr : grid) {
    for (double tc : grid) {
      for (double eps : {0.0, 0.25, 0.5, 0.75, 1.0, tr - tc, std::nextafter(std::max(tr - tc, 0.0), 2.0)}) {
        if (eps < 0) continue;
        ++cases;
        const int want = tr - tc >= eps ? 1 : 0;
        mismatches += overflow_label_threshold(tr, tc, eps) != want;
      }
    }
  }
  return {mismatches == 0, fmt("%zu boundary combinations, %zu mismatches", cases, mismatches)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](const char* name, const Verdict& v) {
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
    failures += !v.pass;
  };
  auto guarded = [&](const char* name, const std::function<Verdict()>& fn) {
    try {
      report(name, fn());
    } catch (const std::exception& e) {
      report(name, {false, std::string("threw: ") + e.what()});
    }
  };

  const auto vs = stat_vectors();
  guarded("statistic-oracles", [&] { return statistic_oracles(vs); });
  guarded("dct-parseval", [&] { return parseval(vs); });
  guarded("roc-auc-oracle", auc_oracle);
  guarded("gradient-checks", gradient_checks);
  guarded("stratification", stratification);

  double linear_joint = std::numeric_limits<double>::quiet_NaN();
  try {
    oracle::TempDir dir("accept-world");
    const auto t0 = Clock::now();
    const World w = paper_mini(dir.path());
    const double gen = seconds_since(t0);
    guarded("synthetic-hierarchy", [&] { return synthetic_hierarchy(w, &linear_joint, gen); });
    guarded("classifier-ablation", [&] {
      if (std::isnan(linear_joint)) return Verdict{false, "no linear baseline"};
      return classifier_ablation(w, linear_joint);
    });
  } catch (const std::exception& e) {
    report("synthetic-hierarchy", {false, std::string("world generation threw: ") + e.what()});
    report("classifier-ablation", {false, "world unavailable"});
  }
  guarded("token-type-separability", token_type);
  guarded("pipeline-determinism", determinism);
  guarded("overflow-label-consistency", label_consistency);

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
