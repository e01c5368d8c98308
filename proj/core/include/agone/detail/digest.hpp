#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace agone::detail {

// FNV-1a 64-bit. Used for compact numeric project identifiers in reports.
std::uint64_t fnv1a64(std::string_view data);

// SHA-1 as 40 lowercase hex characters. Used for content fingerprints
// (pseudo commit pins of non-git checkouts, config/dataset digests).
std::string sha1_hex(std::string_view data);

}  // namespace agone::detail
