// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <stdexcept>
#include <string>

namespace overflow {

// Every library error derives from Error so callers can map failures to
// exit codes without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A statistic or transform was asked for outside its domain (zero vector,
/// constant vector, empty set, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed on-disk data: bad magic, truncation, bad JSON, duplicate ids.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A feature source required by the requested feature set is absent.
class MissingFeatureError : public Error {
 public:
  MissingFeatureError(std::string instance_id, std::string field)
      : Error("instance '" + instance_id + "': missing feature source '" + field + "'"),
        instance_id_(std::move(instance_id)),
        field_(std::move(field)) {}

  const std::string& instance_id() const noexcept { return instance_id_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string instance_id_;
  std::string field_;
};

/// Labels contain a single class; AUC and stratification are undefined.
class SingleClassError : public Error {
 public:
  using Error::Error;
};

/// Training diverged (non-finite loss).
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// External judge could not be reached within the retry budget.
class JudgeUnavailableError : public Error {
 public:
  using Error::Error;
};

/// External judge answered with a body that does not follow the contract.
class JudgeProtocolError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace overflow
