// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <filesystem>

#include "overflow/tensor.hpp"

namespace overflow {

// OVT1 layout (all integers little-endian):
//   bytes 0..3   magic "OVT1"
//   byte  4      dtype code (1 = f32, 2 = f64)
//   byte  5      ndim (1..4)
//   bytes 6..11  zero padding
//   ndim x u64   dimensions
//   payload      row-major elements
inline constexpr char kOvtMagic[4] = {'O', 'V', 'T', '1'};
inline constexpr std::size_t kOvtFixedHeader = 12;

enum class ReadMode { strict, raw };

void write_tensor(const Tensor& t, const std::filesystem::path& path);
Tensor read_tensor(const std::filesystem::path& path, ReadMode mode = ReadMode::strict);

/// Exact on-disk size for a tensor of this shape and dtype.
std::size_t ovt_file_size(const Tensor& t);

}  // namespace overflow
