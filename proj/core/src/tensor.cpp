// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "overflow/tensor.hpp"

#include <cmath>
#include <cstring>
#include <functional>
#include <numeric>
#include <string>

#include "overflow/error.hpp"

namespace overflow {

std::size_t dtype_size(DType dt) {
  switch (dt) {
    case DType::f32:
      return 4;
    case DType::f64:
      return 8;
  }
  throw FormatError("unknown dtype");
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {}

Tensor Tensor::vector(std::vector<float> data) {
  const std::size_t n = data.size();
  return Tensor({n}, std::move(data));
}

Tensor Tensor::vector(std::vector<double> data) {
  const std::size_t n = data.size();
  return Tensor({n}, std::move(data));
}

std::size_t Tensor::size() const noexcept {
  return std::visit([](const auto& v) { return v.size(); }, data_);
}

std::span<const float> Tensor::f32() const {
  if (dtype() != DType::f32) throw FormatError("tensor is not f32");
  return std::get<std::vector<float>>(data_);
}

std::span<const double> Tensor::f64() const {
  if (dtype() != DType::f64) throw FormatError("tensor is not f64");
  return std::get<std::vector<double>>(data_);
}

std::span<float> Tensor::f32_mut() {
  if (dtype() != DType::f32) throw FormatError("tensor is not f32");
  return std::get<std::vector<float>>(data_);
}

std::span<double> Tensor::f64_mut() {
  if (dtype() != DType::f64) throw FormatError("tensor is not f64");
  return std::get<std::vector<double>>(data_);
}

std::vector<double> Tensor::to_f64() const {
  return std::visit([](const auto& v) { return std::vector<double>(v.begin(), v.end()); }, data_);
}

std::vector<double> Tensor::row(std::size_t r) const {
  if (rank() != 2) throw FormatError("row() requires a rank-2 tensor");
  if (r >= shape_[0]) throw FormatError("row index out of range");
  const std::size_t cols = shape_[1];
  return std::visit(
      [&](const auto& v) {
        return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(r * cols),
                                   v.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols));
      },
      data_);
}

void Tensor::validate(bool require_finite) const {
  if (shape_.empty() || shape_.size() > 4) {
    throw FormatError("tensor rank must be 1..4, got " + std::to_string(shape_.size()));
  }
  std::size_t expect = 1;
  for (std::size_t d : shape_) {
    if (d == 0) throw FormatError("tensor dimension must be >= 1");
    expect *= d;
  }
  if (expect != size()) {
    throw FormatError("tensor data length " + std::to_string(size()) + " does not match shape product " +
                      std::to_string(expect));
  }
  if (!require_finite) return;
  std::visit(
      [](const auto& v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (!std::isfinite(v[i])) throw FormatError("non-finite element at flat index " + std::to_string(i));
        }
      },
      data_);
}

bool operator==(const Tensor& a, const Tensor& b) {
  if (a.shape_ != b.shape_ || a.dtype() != b.dtype() || a.size() != b.size()) return false;
  return std::visit(
      [&](const auto& va) {
        using V = std::decay_t<decltype(va)>;
        const auto& vb = std::get<V>(b.data_);
        return std::memcmp(va.data(), vb.data(), va.size() * sizeof(typename V::value_type)) == 0;
      },
      a.data_);
}

}  // namespace overflow
