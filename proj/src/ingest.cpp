#include "cdrkit/ingest.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "cdrkit/csv.hpp"

namespace cdrkit {

namespace {

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open input file: " + path.string());
    return in;
}

void check_header(std::istream& in, std::string_view expected, const char* what) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error(std::string(what) + ": empty file, expected header '" +
                                 std::string(expected) + "'");
    }
    if (csv::strip_cr(line) != expected) {
        throw std::runtime_error(std::string(what) + ": malformed header '" + line +
                                 "', expected '" + std::string(expected) + "'");
    }
}

void check_majority(const RejectionReport& report, const char* what) {
    if (report.total_rows > 0 && report.rejected * 2 > report.total_rows) {
        throw std::runtime_error(std::string(what) + ": " + std::to_string(report.rejected) +
                                 " of " + std::to_string(report.total_rows) +
                                 " rows rejected; majority-bad input suggests the wrong file");
    }
}

}  // namespace

CdrParseResult parse_cdr(const std::filesystem::path& path, const ObservationWindow& window) {
    auto in = open_or_throw(path);
    return parse_cdr(in, window);
}

CdrParseResult parse_cdr(std::istream& in, const ObservationWindow& window) {
    check_header(in, kCdrHeader, "cdr");
    CdrParseResult result;
    std::string line;
    std::vector<std::string_view> fields;
    while (std::getline(in, line)) {
        const std::string_view row = csv::strip_cr(line);
        if (row.empty()) continue;
        ++result.report.total_rows;
        csv::split(row, fields);
        if (fields.size() != 6) {
            result.report.reject("bad-field-count");
            continue;
        }
        const auto ts = parse_utc(fields[0]);
        if (!ts) {
            result.report.reject("bad-timestamp");
            continue;
        }
        if (!window.contains(*ts)) {
            result.report.reject("out-of-window");
            continue;
        }
        if (fields[1].empty() || fields[2].empty() || fields[3].empty()) {
            result.report.reject("empty-id");
            continue;
        }
        if (fields[1] == fields[2]) {
            result.report.reject("self-loop");
            continue;
        }
        CommKind kind;
        if (fields[4] == "CALL") {
            kind = CommKind::Call;
        } else if (fields[4] == "SMS") {
            kind = CommKind::Sms;
        } else {
            result.report.reject("bad-kind");
            continue;
        }
        const auto duration = csv::parse_int(fields[5]);
        if (!duration || *duration < 0) {
            result.report.reject("bad-duration");
            continue;
        }
        CdrRecord rec;
        rec.timestamp = *ts;
        rec.caller_id = std::string(fields[1]);
        rec.callee_id = std::string(fields[2]);
        rec.tower_id = std::string(fields[3]);
        rec.kind = kind;
        // SMS durations in source data are meaningless; force the invariant.
        rec.duration_s = kind == CommKind::Sms ? 0 : *duration;
        result.records.push_back(std::move(rec));
        ++result.report.retained;
    }
    check_majority(result.report, "cdr");
    return result;
}

TopUpParseResult parse_topups(const std::filesystem::path& path, const ObservationWindow& window) {
    auto in = open_or_throw(path);
    return parse_topups(in, window);
}

TopUpParseResult parse_topups(std::istream& in, const ObservationWindow& window) {
    check_header(in, kTopUpHeader, "topup");
    TopUpParseResult result;
    std::string line;
    std::vector<std::string_view> fields;
    while (std::getline(in, line)) {
        const std::string_view row = csv::strip_cr(line);
        if (row.empty()) continue;
        ++result.report.total_rows;
        csv::split(row, fields);
        if (fields.size() != 3) {
            result.report.reject("bad-field-count");
            continue;
        }
        const auto ts = parse_utc(fields[0]);
        if (!ts) {
            result.report.reject("bad-timestamp");
            continue;
        }
        if (!window.contains(*ts)) {
            result.report.reject("out-of-window");
            continue;
        }
        if (fields[1].empty()) {
            result.report.reject("empty-id");
            continue;
        }
        const auto amount = csv::parse_int(fields[2]);
        if (!amount) {
            result.report.reject("bad-amount");
            continue;
        }
        if (*amount <= 0) {
            result.report.reject("non-positive amount");
            continue;
        }
        result.records.push_back(TopUpRecord{*ts, std::string(fields[1]), *amount});
        ++result.report.retained;
    }
    check_majority(result.report, "topup");
    return result;
}

std::vector<TowerInfo> parse_towers(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    return parse_towers(in);
}

std::vector<TowerInfo> parse_towers(std::istream& in) {
    check_header(in, kTowersHeader, "towers");
    std::vector<TowerInfo> towers;
    std::set<std::string, std::less<>> seen;
    std::string line;
    std::vector<std::string_view> fields;
    std::uint64_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        const std::string_view row = csv::strip_cr(line);
        if (row.empty()) continue;
        csv::split(row, fields);
        if (fields.size() != 3 || fields[0].empty()) {
            throw std::runtime_error("towers: malformed row " + std::to_string(row_no));
        }
        const auto lat = csv::parse_double(fields[1]);
        const auto lon = csv::parse_double(fields[2]);
        if (!lat || !lon) {
            throw std::runtime_error("towers: malformed coordinate at row " + std::to_string(row_no));
        }
        if (*lat < -90.0 || *lat > 90.0 || *lon < -180.0 || *lon > 180.0) {
            throw std::runtime_error("towers: coordinate out of range at row " + std::to_string(row_no));
        }
        if (!seen.insert(std::string(fields[0])).second) {
            throw std::runtime_error("towers: duplicate tower_id '" + std::string(fields[0]) + "'");
        }
        towers.push_back(TowerInfo{std::string(fields[0]), *lat, *lon});
    }
    return towers;
}

}  // namespace cdrkit
