#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace medcurate {

/// SHA-256 digest.
struct Digest {
  std::array<std::uint8_t, 32> bytes{};

  std::string hex() const;
  std::uint64_t prefix64() const;

  friend bool operator==(const Digest&, const Digest&) = default;
  friend auto operator<=>(const Digest&, const Digest&) = default;
};

struct DigestHash {
  std::size_t operator()(const Digest& d) const noexcept {
    return static_cast<std::size_t>(d.prefix64());
  }
};

Digest sha256(std::string_view data);
Digest sha256_file(const std::filesystem::path& path);

/// Digest of text::canonicalize(text). Texts that differ only in
/// normalization form or whitespace layout hash equal.
Digest content_hash(std::string_view text);

}  // namespace medcurate
