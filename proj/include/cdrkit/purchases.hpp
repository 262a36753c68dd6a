#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdrkit/records.hpp"

namespace cdrkit {

struct UserPurchaseStats {
    std::string user_id;
    std::uint64_t n_purchases = 0;
    double mean_amount = 0.0;
    double std_amount = 0.0;
    std::optional<double> cv;

    bool operator==(const UserPurchaseStats&) const = default;
};

// Empirical cumulative distribution of a statistic, evaluable at any point.
class CfaCurve {
public:
    explicit CfaCurve(std::vector<double> values);

    // Fraction of values <= x (right-continuous step function).
    double fraction_at(double x) const;
    const std::vector<double>& sorted_values() const { return sorted_; }
    std::size_t size() const { return sorted_.size(); }

private:
    std::vector<double> sorted_;
};

struct RegionIndicator {
    std::string tower_id;
    std::uint64_t n_users = 0;
    double mean_of_means = 0.0;
    double cv_of_means = 0.0;
    double gini_of_means = 0.0;

    bool operator==(const RegionIndicator&) const = default;
};

// Population standard deviation over raw values.
double population_std(const std::vector<double>& values);

// Population CV = sigma/mu; requires n >= 1 and mu > 0.
double population_cv(const std::vector<double>& values);

double gini_pairwise(const std::vector<double>& values);
double gini_sorted(const std::vector<double>& values);

// Dispatches to the exact pairwise sum for n <= 10^4 and the sorted
// identity above that; the two agree to 1e-12 relative.
double gini(const std::vector<double>& values);

// One entry per distinct user, ordered by user_id. Means use exact integer
// accumulation of the minor-unit amounts. cv is absent when n_purchases < 2.
std::vector<UserPurchaseStats> user_stats(const std::vector<TopUpRecord>& topups);

CfaCurve cfa(const std::vector<double>& cv_values);

// CV of the pooled amount series across all users.
double global_cv(const std::vector<TopUpRecord>& topups);

// Modal tower among the records a user initiated; ties go to the tower
// whose first such record is earliest, then to the smaller tower_id.
std::map<std::string, std::string> home_tower_assignment(const std::vector<CdrRecord>& records);

// One record per tower holding >= min_users users with purchase means;
// users absent from home_towers are skipped. Ordered by tower_id.
std::vector<RegionIndicator> region_indicators(
    const std::vector<UserPurchaseStats>& stats,
    const std::map<std::string, std::string>& home_towers,
    std::uint64_t min_users);

}  // namespace cdrkit
