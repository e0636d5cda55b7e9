// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#pragma once

#include <string>
#include <string_view>

namespace overflow {

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view bytes);

/// First 16 hex chars of the SHA-256 of a canonical config serialization.
std::string config_digest(std::string_view canonical_config);

}  // namespace overflow
