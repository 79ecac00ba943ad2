// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace emovec {

using TokenId = std::int32_t;

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// Digest of a token sequence (little-endian 32-bit ids).
std::string token_digest(std::span<const TokenId> tokens);

}  // namespace emovec
