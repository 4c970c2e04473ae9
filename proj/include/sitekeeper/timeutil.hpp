#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "sitekeeper/clock.hpp"

namespace sitekeeper {

// UTC, RFC 3339, second precision: "2026-01-15T03:55:00Z".
std::string format_rfc3339(TimePoint t);
std::optional<TimePoint> parse_rfc3339(std::string_view text);

// Truncate to whole seconds; applied wherever a timestamp is persisted.
TimePoint floor_seconds(TimePoint t);

// "3h55m", "10s", "60d", "250ms", or a bare integer meaning seconds.
// Units: d, h, m, s, ms. Throws std::invalid_argument on garbage.
Duration parse_duration(std::string_view text);
std::string format_duration(Duration d);

double duration_seconds(Duration d);
Duration seconds_duration(double s);

} // namespace sitekeeper
