// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "overflow/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>

#include "overflow/error.hpp"

namespace overflow {

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex.append(buf, 2);
  }
  return hex;
}

std::string config_digest(std::string_view canonical_config) { return sha256_hex(canonical_config).substr(0, 16); }

}  // namespace overflow
