#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cdrkit/records.hpp"

namespace cdrkit {

/// Per-reason rejection counts for one parsed file. retained + rejected
/// always equals total_rows.
struct RejectionReport {
    std::map<std::string, std::uint64_t> by_reason;
    std::uint64_t total_rows = 0;
    std::uint64_t retained = 0;
    std::uint64_t rejected = 0;

    void reject(std::string_view reason) {
        ++by_reason[std::string(reason)];
        ++rejected;
    }
};

struct CdrParseResult {
    std::vector<CdrRecord> records;
    RejectionReport report;
};

struct TopUpParseResult {
    std::vector<TopUpRecord> records;
    RejectionReport report;
};

/// Row-tolerant CDR parse. Malformed rows are counted by reason and skipped;
/// a missing file, a wrong header, or a majority (>50%) of rejected rows is
/// fatal and throws std::runtime_error. Retained rows keep input order.
CdrParseResult parse_cdr(const std::filesystem::path& path, const ObservationWindow& window);
CdrParseResult parse_cdr(std::istream& in, const ObservationWindow& window);

TopUpParseResult parse_topups(const std::filesystem::path& path, const ObservationWindow& window);
TopUpParseResult parse_topups(std::istream& in, const ObservationWindow& window);

/// Tower registry parse. Any defect (duplicate id, out-of-range coordinate,
/// malformed row) is fatal: the registry is reference data, not event noise.
std::vector<TowerInfo> parse_towers(const std::filesystem::path& path);
std::vector<TowerInfo> parse_towers(std::istream& in);

inline constexpr std::string_view kCdrHeader = "timestamp,caller_id,callee_id,tower_id,kind,duration_s";
inline constexpr std::string_view kTopUpHeader = "timestamp,user_id,amount_minor";
inline constexpr std::string_view kTowersHeader = "tower_id,lat,lon";

}  // namespace cdrkit
