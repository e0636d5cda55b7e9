// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace overflow {

enum class DType : std::uint8_t { f32 = 1, f64 = 2 };

std::size_t dtype_size(DType dt);

/// Dense row-major tensor of rank 1..4. Data is held either as float or
/// double; the variant alternative always matches dtype().
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::vector<std::size_t> shape, std::vector<float> data);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor vector(std::vector<float> data);
  static Tensor vector(std::vector<double> data);

  DType dtype() const noexcept { return std::holds_alternative<std::vector<float>>(data_) ? DType::f32 : DType::f64; }
  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const noexcept;

  std::span<const float> f32() const;
  std::span<const double> f64() const;
  std::span<float> f32_mut();
  std::span<double> f64_mut();

  /// Element copy widened to double regardless of storage type.
  std::vector<double> to_f64() const;
  /// Row `r` of a rank-2 tensor, widened to double.
  std::vector<double> row(std::size_t r) const;

  /// Throws FormatError when the shape/data invariants are broken; with
  /// require_finite also rejects NaN/Inf.
  void validate(bool require_finite = true) const;

  /// Bitwise equality of shape, dtype and payload.
  friend bool operator==(const Tensor& a, const Tensor& b);

 private:
  std::vector<std::size_t> shape_;
  std::variant<std::vector<float>, std::vector<double>> data_;
};

}  // namespace overflow
