#pragma once

namespace veracity {

inline constexpr const char* kVersion = "0.1.0";

// Stamped into every machine-readable output object so downstream
// consumers can detect format changes.
inline constexpr int kSchemaVersion = 1;

} // namespace veracity
