// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "overflow/probes/config.hpp"

#include "json.hpp"
#include "overflow/error.hpp"

namespace overflow {

using json = nlohmann::json;

Architecture parse_architecture(std::string_view s) {
  if (s == "logistic") return Architecture::logistic;
  if (s == "linear") return Architecture::linear;
  if (s == "mlp") return Architecture::mlp;
  if (s == "mlp_scl") return Architecture::mlp_scl;
  throw ConfigError("unknown probe architecture '" + std::string(s) + "'");
}

std::string_view to_string(Architecture a) {
  switch (a) {
    case Architecture::logistic:
      return "logistic";
    case Architecture::linear:
      return "linear";
    case Architecture::mlp:
      return "mlp";
    case Architecture::mlp_scl:
      return "mlp_scl";
  }
  return "?";
}

std::string_view to_string(Activation a) { return a == Activation::relu ? "relu" : "silu"; }

ProbeConfig ProbeConfig::defaults(Architecture arch) {
  ProbeConfig c;
  c.architecture = arch;
  switch (arch) {
    case Architecture::logistic:
    case Architecture::linear:
      c.max_epochs = 150;
      break;
    case Architecture::mlp:
      c.hidden_dim = 1024;
      c.activation = Activation::relu;
      c.max_epochs = 50;
      break;
    case Architecture::mlp_scl:
      c.hidden_dim = 1024;
      c.activation = Activation::silu;
      c.dropout = 0.1;
      c.batch_norm = true;
      c.scl_lambda = 0.3;
      c.temperature = 0.07;
      c.max_epochs = 50;
      break;
  }
  return c;
}

void ProbeConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("invalid probe config: ") + what);
  };
  require(hidden_dim >= 1, "hidden_dim must be >= 1");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must be in [0, 1)");
  require(learning_rate > 0.0, "learning_rate must be > 0");
  require(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0, "adam betas must be in [0, 1)");
  require(adam_eps > 0.0, "adam_eps must be > 0");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(max_epochs >= 1, "max_epochs must be >= 1");
  require(patience >= 1, "patience must be >= 1");
  require(validation_fraction > 0.0 && validation_fraction < 1.0, "validation_fraction must be in (0, 1)");
  require(lambda_l2 >= 0.0 && lambda_l1 >= 0.0, "regularization weights must be >= 0");
  require(scl_lambda >= 0.0, "scl_lambda must be >= 0");
  require(temperature > 0.0, "temperature must be > 0");
  require(bn_momentum > 0.0 && bn_momentum <= 1.0, "bn_momentum must be in (0, 1]");
  require(bn_eps > 0.0, "bn_eps must be > 0");
  require(logistic_c > 0.0, "logistic C must be > 0");
  require(logistic_max_iter >= 1, "logistic_max_iter must be >= 1");
  require(logistic_tol > 0.0, "logistic_tol must be > 0");
}

std::string ProbeConfig::to_json() const {
  json j;
  j["architecture"] = std::string(to_string(architecture));
  j["hidden_dim"] = hidden_dim;
  j["activation"] = std::string(to_string(activation));
  j["dropout"] = dropout;
  j["batch_norm"] = batch_norm;
  j["learning_rate"] = learning_rate;
  j["adam_beta1"] = adam_beta1;
  j["adam_beta2"] = adam_beta2;
  j["adam_eps"] = adam_eps;
  j["batch_size"] = batch_size;
  j["max_epochs"] = max_epochs;
  j["patience"] = patience;
  j["validation_fraction"] = validation_fraction;
  j["lambda_l2"] = lambda_l2;
  j["lambda_l1"] = lambda_l1;
  j["scl_lambda"] = scl_lambda;
  j["temperature"] = temperature;
  j["bn_momentum"] = bn_momentum;
  j["bn_eps"] = bn_eps;
  j["logistic_c"] = logistic_c;
  j["logistic_max_iter"] = logistic_max_iter;
  j["logistic_tol"] = logistic_tol;
  j["seed"] = seed;
  return j.dump();
}

ProbeConfig ProbeConfig::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("probe config is not valid JSON: ") + e.what());
  }
  ProbeConfig c = defaults(parse_architecture(j.value("architecture", std::string("linear"))));
  auto take = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
  };
  take("hidden_dim", c.hidden_dim);
  if (j.contains("activation")) c.activation = j["activation"].get<std::string>() == "silu" ? Activation::silu : Activation::relu;
  take("dropout", c.dropout);
  take("batch_norm", c.batch_norm);
  take("learning_rate", c.learning_rate);
  take("adam_beta1", c.adam_beta1);
  take("adam_beta2", c.adam_beta2);
  take("adam_eps", c.adam_eps);
  take("batch_size", c.batch_size);
  take("max_epochs", c.max_epochs);
  take("patience", c.patience);
  take("validation_fraction", c.validation_fraction);
  take("lambda_l2", c.lambda_l2);
  take("lambda_l1", c.lambda_l1);
  take("scl_lambda", c.scl_lambda);
  take("temperature", c.temperature);
  take("bn_momentum", c.bn_momentum);
  take("bn_eps", c.bn_eps);
  take("logistic_c", c.logistic_c);
  take("logistic_max_iter", c.logistic_max_iter);
  take("logistic_tol", c.logistic_tol);
  take("seed", c.seed);
  c.validate();
  return c;
}

}  // namespace overflow
