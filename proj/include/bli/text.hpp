#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bli::text {

/// Strips ASCII whitespace from both ends.
std::string_view trim(std::string_view s);

bool has_whitespace(std::string_view s);

/// Lowercases UTF-8 text. Covers ASCII, Latin-1, Latin Extended-A, Greek and
/// Cyrillic; other code points pass through unchanged.
std::string to_lower(std::string_view s);

/// Splits on runs of ASCII whitespace, dropping empty pieces.
std::vector<std::string_view> split_ws(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);

/// Replaces every occurrence of `from` with `to`.
std::string replace_all(std::string_view s, std::string_view from, std::string_view to);

/// 64-bit FNV-1a; stable across platforms, used for seeding and checksums.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace bli::text
