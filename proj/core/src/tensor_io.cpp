// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "overflow/tensor_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>
#include <string>
#include <system_error>

#include "overflow/error.hpp"

namespace overflow {

namespace {

template <typename T>
T byteswap_if_big(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::array<unsigned char, sizeof(T)> b;
    std::memcpy(b.data(), &v, sizeof(T));
    std::reverse(b.begin(), b.end());
    std::memcpy(&v, b.data(), sizeof(T));
    return v;
  }
}

template <typename T>
void put_le(std::string& out, T v) {
  v = byteswap_if_big(v);
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return byteswap_if_big(v);
}

std::size_t product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

template <typename T>
void append_payload(std::string& out, std::span<const T> data) {
  if constexpr (std::endian::native == std::endian::little) {
    out.append(reinterpret_cast<const char*>(data.data()), data.size_bytes());
  } else {
    for (T v : data) put_le(out, v);
  }
}

template <typename T>
std::vector<T> decode_payload(const char* p, std::size_t count) {
  std::vector<T> v(count);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(v.data(), p, count * sizeof(T));
  } else {
    for (std::size_t i = 0; i < count; ++i) v[i] = get_le<T>(p + i * sizeof(T));
  }
  return v;
}

}  // namespace

std::size_t ovt_file_size(const Tensor& t) {
  return kOvtFixedHeader + 8 * t.rank() + dtype_size(t.dtype()) * t.size();
}

void write_tensor(const Tensor& t, const std::filesystem::path& path) {
  t.validate(/*require_finite=*/true);

  std::string buf;
  buf.reserve(ovt_file_size(t));
  buf.append(kOvtMagic, 4);
  buf.push_back(static_cast<char>(t.dtype()));
  buf.push_back(static_cast<char>(t.rank()));
  buf.append(6, '\0');
  for (std::size_t d : t.shape()) put_le<std::uint64_t>(buf, d);
  if (t.dtype() == DType::f32) {
    append_payload(buf, t.f32());
  } else {
    append_payload(buf, t.f64());
  }

  // Write-then-rename so readers never observe a partial file.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + tmp.string() + "' for writing");
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!os) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "': " + ec.message());
}

Tensor read_tensor(const std::filesystem::path& path, ReadMode mode) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open tensor file '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  const std::string where = "'" + path.string() + "'";

  if (bytes.size() < kOvtFixedHeader) throw FormatError(where + ": truncated header");
  if (std::memcmp(bytes.data(), kOvtMagic, 4) != 0) throw FormatError(where + ": bad magic");

  const auto code = static_cast<std::uint8_t>(bytes[4]);
  if (code != 1 && code != 2) {
    throw FormatError(where + ": unsupported dtype code " + std::to_string(code));
  }
  const auto dtype = static_cast<DType>(code);
  const auto ndim = static_cast<std::uint8_t>(bytes[5]);
  if (ndim < 1 || ndim > 4) throw FormatError(where + ": ndim must be 1..4, got " + std::to_string(ndim));

  const std::size_t header = kOvtFixedHeader + 8 * ndim;
  if (bytes.size() < header) throw FormatError(where + ": truncated dimensions");
  std::vector<std::size_t> shape(ndim);
  for (std::size_t i = 0; i < ndim; ++i) {
    const auto d = get_le<std::uint64_t>(bytes.data() + kOvtFixedHeader + 8 * i);
    if (d == 0) throw FormatError(where + ": zero-length dimension");
    shape[i] = static_cast<std::size_t>(d);
  }

  const std::size_t count = product(shape);
  const std::size_t expected = header + count * dtype_size(dtype);
  if (bytes.size() < expected) {
    throw FormatError(where + ": truncated payload (expected " + std::to_string(expected - header) +
                      " bytes, found " + std::to_string(bytes.size() - header) + ")");
  }
  if (bytes.size() > expected) throw FormatError(where + ": trailing bytes after payload");

  const char* payload = bytes.data() + header;
  Tensor t = dtype == DType::f32 ? Tensor(std::move(shape), decode_payload<float>(payload, count))
                                 : Tensor(std::move(shape), decode_payload<double>(payload, count));
  try {
    t.validate(mode == ReadMode::strict);
  } catch (const FormatError& e) {
    throw FormatError(where + ": " + e.what());
  }
  return t;
}

}  // namespace overflow
