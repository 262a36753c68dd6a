#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cdrkit {

/// Seconds since the Unix epoch, UTC. All timestamps in the pipeline use
/// second resolution and UTC only; there is no local-time handling anywhere.
using UtcSeconds = std::int64_t;

/// Parse a strict ISO-8601 UTC instant of the form "2012-03-01T10:00:00Z".
/// Returns nullopt on any deviation (length, separators, digit ranges,
/// impossible calendar dates).
std::optional<UtcSeconds> parse_utc(std::string_view text);

/// Inverse of parse_utc.
std::string format_utc(UtcSeconds t);

/// Index of the calendar month containing t: (year - 1970) * 12 + month - 1.
/// Used for the monthly-persistence edge rule and synthetic generation.
int month_index(UtcSeconds t);

/// First instant (00:00:00 on day 1) of the given month index.
UtcSeconds month_start(int month_idx);

}  // namespace cdrkit
