// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "overflow/probes/model.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "overflow/digest.hpp"
#include "overflow/error.hpp"
#include "overflow/tensor_io.hpp"

namespace overflow {

using json = nlohmann::json;
namespace fs = std::filesystem;

ProbeModel fit_probe(const Eigen::MatrixXd& x, std::span<const int> y, const ProbeConfig& cfg) {
  cfg.validate();
  ProbeModel m;
  m.config = cfg;
  m.config_digest = config_digest(cfg.to_json());
  m.scaler = standardize_fit(x);
  m.monitored_metric = cfg.architecture == Architecture::logistic ? "train_objective" : "val_bce";
  m.params = train_probe(m.scaler.apply(x), y, cfg, &m.trace);
  return m;
}

Eigen::VectorXd predict_scores(const ProbeModel& model, const Eigen::MatrixXd& x) {
  if (static_cast<std::size_t>(x.cols()) != model.input_dim()) {
    throw DomainError("model expects " + std::to_string(model.input_dim()) + " features, got " +
                      std::to_string(x.cols()));
  }
  const Eigen::VectorXd logits = probe_logits<double>(model.params, model.scaler.apply(x), model.config);
  return logits.unaryExpr([](double l) {
    if (l >= 0.0) return 1.0 / (1.0 + std::exp(-l));
    const double e = std::exp(l);
    return e / (1.0 + e);
  });
}

namespace {

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Row-major tensor <-> column-major Eigen block.
Tensor block_to_tensor(const Eigen::MatrixXd& m, DType dt) {
  const auto rows = static_cast<std::size_t>(m.rows());
  const auto cols = static_cast<std::size_t>(m.cols());
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  if (dt == DType::f32) {
    std::vector<float> d(rm.size());
    for (Eigen::Index i = 0; i < rm.size(); ++i) d[static_cast<std::size_t>(i)] = static_cast<float>(rm.data()[i]);
    return Tensor({rows, cols}, std::move(d));
  }
  return Tensor({rows, cols}, std::vector<double>(rm.data(), rm.data() + rm.size()));
}

Eigen::MatrixXd tensor_to_block(const Tensor& t) {
  if (t.rank() != 2) throw FormatError("model parameter tensors must be rank 2");
  const std::vector<double> v = t.to_f64();
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      v.data(), static_cast<Eigen::Index>(t.dim(0)), static_cast<Eigen::Index>(t.dim(1)));
}

}  // namespace

void save_model(const ProbeModel& model, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create model directory " + dir.string() + ": " + ec.message());

  // Neural probes are trained in single precision, so f32 storage is exact.
  const DType dt = model.config.architecture == Architecture::logistic ? DType::f64 : DType::f32;
  json j;
  j["format_version"] = kModelFormatVersion;
  j["config"] = json::parse(model.config.to_json());
  j["config_digest"] = model.config_digest;
  j["monitored_metric"] = model.monitored_metric;
  j["input_dim"] = model.input_dim();
  j["scaler"] = {{"mean", to_vec(model.scaler.mean)}, {"std", to_vec(model.scaler.std)}, {"floored", model.scaler.floored}};
  j["trace"] = {{"best_epoch", model.trace.best_epoch},
                {"best_val_loss", model.trace.best_val_loss},
                {"epochs_run", model.trace.epochs_run},
                {"early_stopped", model.trace.early_stopped},
                {"train_loss", model.trace.train_loss},
                {"val_loss", model.trace.val_loss}};

  json blocks = json::object();
  auto put = [&](const std::string& name, const Eigen::MatrixXd& m) {
    if (m.size() == 0) return;
    const std::string file = name + ".ovt";
    write_tensor(block_to_tensor(m, dt), dir / file);
    blocks[name] = file;
  };
  const auto pb = model.params.blocks();
  for (std::size_t k = 0; k < ProbeParams<double>::kTrainable; ++k) put(ProbeParams<double>::kNames[k], *pb[k]);
  put("running_mean", model.params.running_mean);
  put("running_var", model.params.running_var);
  j["blocks"] = blocks;

  const fs::path tmp = dir / "model.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  fs::rename(tmp, dir / "model.json", ec);
  if (ec) throw IoError("cannot finalize model.json: " + ec.message());
}

ProbeModel load_model(const fs::path& dir) {
  std::ifstream in(dir / "model.json", std::ios::binary);
  if (!in) throw IoError("cannot open " + (dir / "model.json").string());
  std::stringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::exception& e) {
    throw FormatError(std::string("model.json is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != kModelFormatVersion) {
      throw FormatError("unsupported model format version " + j.at("format_version").dump());
    }
    ProbeModel m;
    m.config = ProbeConfig::from_json(j.at("config").dump());
    m.config_digest = j.at("config_digest").get<std::string>();
    m.monitored_metric = j.at("monitored_metric").get<std::string>();
    m.scaler.mean = from_vec(j.at("scaler").at("mean").get<std::vector<double>>());
    m.scaler.std = from_vec(j.at("scaler").at("std").get<std::vector<double>>());
    m.scaler.floored = j.at("scaler").at("floored").get<std::size_t>();
    const json& t = j.at("trace");
    m.trace.best_epoch = t.at("best_epoch").get<std::size_t>();
    m.trace.best_val_loss = t.at("best_val_loss").is_null() ? 0.0 : t.at("best_val_loss").get<double>();
    m.trace.epochs_run = t.at("epochs_run").get<std::size_t>();
    m.trace.early_stopped = t.at("early_stopped").get<bool>();
    m.trace.train_loss = t.at("train_loss").get<std::vector<double>>();
    m.trace.val_loss = t.at("val_loss").get<std::vector<double>>();

    const json& blocks = j.at("blocks");
    auto get = [&](const std::string& name, Eigen::MatrixXd& dst) {
      if (blocks.contains(name)) dst = tensor_to_block(read_tensor(dir / blocks.at(name).get<std::string>()));
    };
    auto pb = m.params.blocks();
    for (std::size_t k = 0; k < ProbeParams<double>::kTrainable; ++k) get(ProbeParams<double>::kNames[k], *pb[k]);
    get("running_mean", m.params.running_mean);
    get("running_var", m.params.running_var);
    if (m.params.w1.size() == 0 || m.params.b1.size() == 0) throw FormatError("model is missing w1/b1");
    if (static_cast<std::size_t>(m.scaler.mean.size()) != m.input_dim() ||
        m.scaler.std.size() != m.scaler.mean.size()) {
      throw FormatError("scaler width does not match model input");
    }
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("model.json is malformed: ") + e.what());
  }
}

}  // namespace overflow
