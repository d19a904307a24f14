#pragma once

namespace sllg {

inline constexpr int version_major = 0;
inline constexpr int version_minor = 1;
inline constexpr int version_patch = 0;
inline constexpr const char* version_string = "0.1.0";

// Bumped whenever the layout of config.json / report.json changes.
inline constexpr int schema_version = 1;

}  // namespace sllg
