#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace mcsim::csv {

/// Shortest round-trip decimal form; stable across runs on a given platform.
std::string format(double value);
std::string format(std::int64_t value);
inline std::string format(int value) { return format(static_cast<std::int64_t>(value)); }
inline std::string format(bool value) { return value ? "true" : "false"; }

/// Quotes a field when it holds a comma, quote or newline.
std::string field(std::string_view text);

}  // namespace mcsim::csv
