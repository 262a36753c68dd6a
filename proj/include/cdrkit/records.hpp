#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdrkit/timeutil.hpp"

namespace cdrkit {

enum class CommKind : std::uint8_t { Call, Sms };

/// One call or text message event. tower_id is the cell used by the caller.
struct CdrRecord {
    UtcSeconds timestamp = 0;
    std::string caller_id;
    std::string callee_id;
    std::string tower_id;
    CommKind kind = CommKind::Call;
    std::int64_t duration_s = 0;  // always 0 for SMS

    bool operator==(const CdrRecord&) const = default;
};

/// One airtime credit purchase, amount in currency minor units.
struct TopUpRecord {
    UtcSeconds timestamp = 0;
    std::string user_id;
    std::int64_t amount_minor = 0;  // > 0

    bool operator==(const TopUpRecord&) const = default;
};

struct TowerInfo {
    std::string tower_id;
    double lat = 0.0;  // degrees, [-90, 90]
    double lon = 0.0;  // degrees, [-180, 180]

    bool operator==(const TowerInfo&) const = default;
};

/// Half-open UTC interval [start, end) plus the contiguous calendar months
/// it touches. Month membership of a timestamp is decided by its UTC
/// calendar month.
class ObservationWindow {
public:
    ObservationWindow(UtcSeconds start, UtcSeconds end)
        : start_(start), end_(end) {
        if (start >= end) throw std::invalid_argument("observation window: start must precede end");
        first_month_ = month_index(start);
        month_count_ = month_index(end - 1) - first_month_ + 1;
    }

    /// Window spanning n whole calendar months beginning at `start`
    /// (which is normally the first instant of a month).
    static ObservationWindow from_months(UtcSeconds start, int n_months) {
        if (n_months < 1) throw std::invalid_argument("observation window: need at least one month");
        return ObservationWindow(start, month_start(month_index(start) + n_months));
    }

    UtcSeconds start() const { return start_; }
    UtcSeconds end() const { return end_; }
    bool contains(UtcSeconds t) const { return t >= start_ && t < end_; }

    int first_month() const { return first_month_; }
    int month_count() const { return month_count_; }

    /// 0-based month slot inside the window; caller must ensure contains(t).
    int month_offset(UtcSeconds t) const { return month_index(t) - first_month_; }

private:
    UtcSeconds start_;
    UtcSeconds end_;
    int first_month_;
    int month_count_;
};

}  // namespace cdrkit
