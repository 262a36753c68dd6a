#include "cdrkit/purchases.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace cdrkit {

namespace {

double mean_of(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

void require_positive(const std::vector<double>& values, const char* what) {
    if (values.empty()) throw std::invalid_argument(std::string(what) + ": empty input");
    for (double v : values) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string(what) + ": values must be positive and finite");
        }
    }
}

}  // namespace

double population_std(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("population_std: empty input");
    const double mu = mean_of(values);
    double ss = 0.0;
    for (double v : values) {
        const double d = v - mu;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(values.size()));
}

double population_cv(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("population_cv: empty input");
    const double mu = mean_of(values);
    if (!(mu > 0.0)) throw std::invalid_argument("population_cv: mean must be positive");
    return population_std(values) / mu;
}

double gini_pairwise(const std::vector<double>& values) {
    require_positive(values, "gini");
    const auto n = values.size();
    double abs_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            abs_sum += std::abs(values[i] - values[j]);
        }
    }
    const double mu = mean_of(values);
    return abs_sum / (2.0 * static_cast<double>(n) * static_cast<double>(n) * mu);
}

double gini_sorted(const std::vector<double>& values) {
    require_positive(values, "gini");
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const auto n = sorted.size();
    // With x ascending and 1-based rank i: sum_{i<j}(x_j - x_i) = sum_i (2i - n - 1) x_i,
    // so G = sum_i (2i - n - 1) x_i / (n^2 mu).
    double weighted = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double rank_coeff = 2.0 * static_cast<double>(i + 1) - static_cast<double>(n) - 1.0;
        weighted += rank_coeff * sorted[i];
        total += sorted[i];
    }
    const double mu = total / static_cast<double>(n);
    return weighted / (static_cast<double>(n) * static_cast<double>(n) * mu);
}

double gini(const std::vector<double>& values) {
    return values.size() <= 10000 ? gini_pairwise(values) : gini_sorted(values);
}

std::vector<UserPurchaseStats> user_stats(const std::vector<TopUpRecord>& topups) {
    struct Acc {
        std::uint64_t n = 0;
        std::int64_t total = 0;
        std::vector<std::int64_t> amounts;
    };
    std::map<std::string, Acc> by_user;
    for (const auto& t : topups) {
        if (t.amount_minor <= 0) throw std::invalid_argument("user_stats: non-positive amount");
        auto& acc = by_user[t.user_id];
        ++acc.n;
        acc.total += t.amount_minor;
        acc.amounts.push_back(t.amount_minor);
    }
    std::vector<UserPurchaseStats> result;
    result.reserve(by_user.size());
    for (auto& [user_id, acc] : by_user) {
        UserPurchaseStats s;
        s.user_id = user_id;
        s.n_purchases = acc.n;
        s.mean_amount = static_cast<double>(acc.total) / static_cast<double>(acc.n);
        double ss = 0.0;
        for (std::int64_t a : acc.amounts) {
            const double d = static_cast<double>(a) - s.mean_amount;
            ss += d * d;
        }
        s.std_amount = std::sqrt(ss / static_cast<double>(acc.n));
        if (acc.n >= 2) s.cv = s.std_amount / s.mean_amount;
        result.push_back(std::move(s));
    }
    return result;
}

CfaCurve::CfaCurve(std::vector<double> values) : sorted_(std::move(values)) {
    if (sorted_.empty()) throw std::invalid_argument("cfa: empty input");
    for (double v : sorted_) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("cfa: values must be finite and non-negative");
        }
    }
    std::sort(sorted_.begin(), sorted_.end());
}

double CfaCurve::fraction_at(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

CfaCurve cfa(const std::vector<double>& cv_values) { return CfaCurve(cv_values); }

double global_cv(const std::vector<TopUpRecord>& topups) {
    if (topups.size() < 2) throw std::invalid_argument("global_cv: need at least 2 purchases");
    std::vector<double> amounts;
    amounts.reserve(topups.size());
    for (const auto& t : topups) amounts.push_back(static_cast<double>(t.amount_minor));
    return population_cv(amounts);
}

std::map<std::string, std::string> home_tower_assignment(const std::vector<CdrRecord>& records) {
    struct TowerTally {
        std::uint64_t count = 0;
        UtcSeconds first_seen = 0;
    };
    std::unordered_map<std::string, std::map<std::string, TowerTally>> per_user;
    for (const auto& rec : records) {
        auto& tally = per_user[rec.caller_id][rec.tower_id];
        if (tally.count == 0 || rec.timestamp < tally.first_seen) tally.first_seen = rec.timestamp;
        ++tally.count;
    }
    std::map<std::string, std::string> home;
    for (const auto& [user, towers] : per_user) {
        const std::string* best = nullptr;
        TowerTally best_tally;
        for (const auto& [tower, tally] : towers) {
            const bool wins = best == nullptr || tally.count > best_tally.count ||
                              (tally.count == best_tally.count &&
                               tally.first_seen < best_tally.first_seen);
            if (wins) {
                best = &tower;
                best_tally = tally;
            }
        }
        home.emplace(user, *best);
    }
    return home;
}

std::vector<RegionIndicator> region_indicators(
    const std::vector<UserPurchaseStats>& stats,
    const std::map<std::string, std::string>& home_towers,
    std::uint64_t min_users) {
    if (min_users < 1) throw std::invalid_argument("region_indicators: min_users must be >= 1");
    std::map<std::string, std::vector<double>> means_by_tower;
    for (const auto& s : stats) {
        const auto it = home_towers.find(s.user_id);
        if (it == home_towers.end()) continue;
        means_by_tower[it->second].push_back(s.mean_amount);
    }
    std::vector<RegionIndicator> result;
    for (auto& [tower_id, means] : means_by_tower) {
        if (means.size() < min_users) continue;
        RegionIndicator ind;
        ind.tower_id = tower_id;
        ind.n_users = means.size();
        ind.mean_of_means = mean_of(means);
        ind.cv_of_means = population_cv(means);
        ind.gini_of_means = gini(means);
        result.push_back(std::move(ind));
    }
    return result;
}

}  // namespace cdrkit
