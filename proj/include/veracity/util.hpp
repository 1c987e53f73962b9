#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace veracity::util {

/// Lowercase for UTF-8 text covering Basic Latin, Latin-1 Supplement and
/// Latin Extended-A (enough for Dutch and English, including accented
/// characters and the IJ digraph). Unknown sequences pass through unchanged.
std::string to_lower(std::string_view text);

std::string trim(std::string_view text);

/// Collapse every run of whitespace to a single space and trim the ends.
/// Used to normalize strings before substring containment checks.
std::string collapse_ws(std::string_view text);

std::vector<std::string> split_lines(std::string_view text);

/// Hex-encoded SHA-256 digest (OpenSSL).
std::string sha256_hex(std::string_view data);

} // namespace veracity::util
