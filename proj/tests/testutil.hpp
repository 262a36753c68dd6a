#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdrkit/communities.hpp"
#include "cdrkit/records.hpp"
#include "cdrkit/rng.hpp"
#include "cdrkit/socialgraph.hpp"

// Independent re-implementations of the quantities under test. These are
// deliberately written with different algorithms/structures than the
// library so agreement is meaningful.
namespace testutil {

inline std::filesystem::path make_temp_dir(const std::string& hint) {
    static std::atomic<std::uint64_t> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    const auto dir = std::filesystem::temp_directory_path() /
                     ("cdrkit-" + hint + "-" + std::to_string(stamp) + "-" +
                      std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(dir);
    return dir;
}

// Pairwise mean-absolute-difference Gini, O(n^2), i<j form.
inline double gini_oracle(const std::vector<double>& values) {
    const auto n = values.size();
    double sum = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += values[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            sum += std::abs(values[i] - values[j]);
        }
    }
    const double mu = total / static_cast<double>(n);
    return 2.0 * sum / (2.0 * static_cast<double>(n) * static_cast<double>(n) * mu);
}

// From-scratch double loop over all ordered node pairs.
inline double modularity_oracle(const cdrkit::SocialGraph& g, const cdrkit::Partition& p,
                                double gamma) {
    const auto n = g.n_nodes();
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (const auto& e : g.edges()) {
        a[e.a][e.b] = static_cast<double>(e.weight);
        a[e.b][e.a] = static_cast<double>(e.weight);
    }
    const double m2 = 2.0 * static_cast<double>(g.total_weight());
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (p.community_of[i] != p.community_of[j]) continue;
            const double ki = static_cast<double>(g.strength(static_cast<std::int32_t>(i)));
            const double kj = static_cast<double>(g.strength(static_cast<std::int32_t>(j)));
            q += a[i][j] - gamma * ki * kj / m2;
        }
    }
    return q / m2;
}

// Enumerates every set partition of {0..n-1} as a label vector in
// restricted-growth form.
inline void all_partitions(int n,
                           const std::function<void(const std::vector<std::int32_t>&)>& fn) {
    std::vector<std::int32_t> labels(n, 0);
    const std::function<void(int, int)> rec = [&](int item, int max_used) {
        if (item == n) {
            fn(labels);
            return;
        }
        for (int g = 0; g <= max_used + 1; ++g) {
            labels[item] = g;
            rec(item + 1, std::max(max_used, g));
        }
    };
    if (n > 0) rec(0, -1);
}

inline double nmi(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("nmi: label vectors must be equal-sized and non-empty");
    }
    const double n = static_cast<double>(a.size());
    std::map<int, int> ca, cb;
    std::map<std::pair<int, int>, int> joint;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++ca[a[i]];
        ++cb[b[i]];
        ++joint[{a[i], b[i]}];
    }
    double h1 = 0.0, h2 = 0.0, mi = 0.0;
    for (const auto& [label, count] : ca) {
        const double p = count / n;
        h1 -= p * std::log(p);
    }
    for (const auto& [label, count] : cb) {
        const double p = count / n;
        h2 -= p * std::log(p);
    }
    for (const auto& [pair, count] : joint) {
        const double pij = count / n;
        const double pi = ca[pair.first] / n;
        const double pj = cb[pair.second] / n;
        mi += pij * std::log(pij / (pi * pj));
    }
    if (h1 + h2 == 0.0) return 1.0;  // both partitions trivial
    return 2.0 * mi / (h1 + h2);
}

namespace detail {

// Regularized incomplete gamma functions (series + continued fraction).
inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

// Upper-tail p-value of a chi-square statistic with df degrees of freedom.
inline double chi2_p_value(double chi2, int df) {
    if (chi2 < 0.0 || df < 1) throw std::invalid_argument("chi2_p_value: bad arguments");
    if (chi2 == 0.0) return 1.0;
    const double a = df / 2.0;
    const double x = chi2 / 2.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_contfrac(a, x);
}

inline cdrkit::SocialGraph erdos_renyi(int n, double p, std::uint64_t seed) {
    cdrkit::rng::Engine eng(seed);
    std::vector<std::string> ids;
    ids.reserve(n);
    for (int i = 0; i < n; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "n%04d", i);
        ids.emplace_back(buf);
    }
    std::vector<cdrkit::Edge> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (cdrkit::rng::uniform01(eng) < p) {
                edges.push_back(cdrkit::Edge{i, j, 1});
            }
        }
    }
    return cdrkit::SocialGraph(std::move(ids), std::move(edges));
}

struct OracleEdge {
    std::string a;
    std::string b;
    std::int64_t weight = 0;

    bool operator==(const OracleEdge&) const = default;
    auto operator<=>(const OracleEdge&) const = default;
};

// Independent month-coverage scan over raw records.
inline std::vector<OracleEdge> edge_rule_oracle(const std::vector<cdrkit::CdrRecord>& records,
                                                const cdrkit::ObservationWindow& window,
                                                int min_months) {
    struct Acc {
        std::set<int> months;
        std::int64_t events = 0;
    };
    std::map<std::pair<std::string, std::string>, Acc> pairs;
    for (const auto& r : records) {
        auto key = std::minmax(r.caller_id, r.callee_id);
        auto& acc = pairs[{key.first, key.second}];
        acc.months.insert(window.month_offset(r.timestamp));
        ++acc.events;
    }
    std::vector<OracleEdge> edges;
    for (const auto& [key, acc] : pairs) {
        if (static_cast<int>(acc.months.size()) < min_months) continue;
        edges.push_back(OracleEdge{key.first, key.second, acc.events});
    }
    return edges;
}

inline std::vector<double> ranks_with_ties(const std::vector<double>& values) {
    const auto n = values.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

inline double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("spearman_rho: need two equal-sized series");
    }
    const auto rx = ranks_with_ties(x);
    const auto ry = ranks_with_ties(y);
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    return num / std::sqrt(dx * dy);
}

}  // namespace testutil
