#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace hems {

/// Shortest round-trip decimal form of `value`, independent of the locale.
std::string format_number(double value);

/// Locale-independent parse of a full decimal token; nullopt on any junk.
std::optional<double> parse_number(std::string_view text);

}  // namespace hems
