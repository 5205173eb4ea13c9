#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace patentlens::features {

inline constexpr std::string_view kNumberToken = "<num>";

/// Lowercases ASCII, splits on every non-[A-Za-z0-9] byte, drops tokens shorter
/// than two characters and replaces all-digit tokens with "<num>". Stops after
/// `max_tokens` tokens.
std::vector<std::string> tokenize(std::string_view text,
                                  std::size_t max_tokens = std::numeric_limits<std::size_t>::max());

/// Number of tokens tokenize() would return, without materializing them.
std::size_t count_tokens(std::string_view text,
                         std::size_t max_tokens = std::numeric_limits<std::size_t>::max());

inline constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

/// 64-bit FNV-1a over raw bytes.
constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t hash = kFnvOffsetBasis) {
  for (char c : bytes) {
    hash ^= static_cast<std::uint8_t>(c);
    hash *= kFnvPrime;
  }
  return hash;
}

/// Lowercase 16-digit hex.
std::string hex64(std::uint64_t value);

}  // namespace patentlens::features
