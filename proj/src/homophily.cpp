#include "cdrkit/homophily.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "cdrkit/purchases.hpp"
#include "cdrkit/rng.hpp"

namespace cdrkit {

namespace {

constexpr double kEarthRadiusKm = 6371.0088;
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

// Mean-bearing graph nodes in ascending node order, with the context
// needed to recompute the weighted CV under any assignment of means.
struct MeanSlots {
    std::vector<std::int32_t> comm_of_slot;
    std::vector<double> means;
    std::vector<std::uint64_t> comm_sizes;
};

MeanSlots collect_slots(const Partition& partition, const SocialGraph& graph,
                        const std::map<std::string, double>& user_means) {
    if (partition.community_of.size() != graph.n_nodes()) {
        throw std::invalid_argument("homophily: partition does not cover the graph");
    }
    MeanSlots slots;
    for (std::size_t i = 0; i < graph.n_nodes(); ++i) {
        const auto it = user_means.find(graph.node_id(static_cast<std::int32_t>(i)));
        if (it == user_means.end()) continue;
        slots.comm_of_slot.push_back(partition.community_of[i]);
        slots.means.push_back(it->second);
    }
    slots.comm_sizes.reserve(partition.n_communities());
    for (const auto& members : partition.members) slots.comm_sizes.push_back(members.size());
    return slots;
}

double weighted_cv_of_assignment(const MeanSlots& slots, const std::vector<double>& assigned) {
    std::vector<std::vector<double>> by_comm(slots.comm_sizes.size());
    for (std::size_t i = 0; i < slots.comm_of_slot.size(); ++i) {
        by_comm[slots.comm_of_slot[i]].push_back(assigned[i]);
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t c = 0; c < by_comm.size(); ++c) {
        if (by_comm[c].size() < 2) continue;
        const double w = static_cast<double>(slots.comm_sizes[c]);
        num += w * population_cv(by_comm[c]);
        den += w;
    }
    if (den == 0.0) {
        throw std::invalid_argument("homophily: no community with a defined CV");
    }
    return num / den;
}

}  // namespace

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
    const double phi1 = lat1 * kDegToRad;
    const double phi2 = lat2 * kDegToRad;
    const double dphi = (lat2 - lat1) * kDegToRad;
    const double dlambda = (lon2 - lon1) * kDegToRad;
    const double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
                     std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) * std::sin(dlambda / 2);
    return 2.0 * kEarthRadiusKm * std::atan2(std::sqrt(a), std::sqrt(1.0 - a));
}

std::vector<CommunityWealthStats> community_wealth_stats(
    const Partition& partition,
    const SocialGraph& graph,
    const std::map<std::string, double>& user_means,
    const std::map<std::string, std::string>& home_towers,
    const std::vector<TowerInfo>& towers) {
    if (partition.community_of.size() != graph.n_nodes()) {
        throw std::invalid_argument("homophily: partition does not cover the graph");
    }
    std::unordered_map<std::string_view, const TowerInfo*> registry;
    registry.reserve(towers.size());
    for (const auto& t : towers) registry.emplace(t.tower_id, &t);

    std::vector<CommunityWealthStats> result;
    result.reserve(partition.n_communities());
    for (std::size_t c = 0; c < partition.n_communities(); ++c) {
        CommunityWealthStats s;
        s.community_id = static_cast<std::int32_t>(c);
        s.size = partition.members[c].size();
        std::vector<double> means;
        double lat_sum = 0.0, lon_sum = 0.0;
        std::uint64_t located = 0;
        for (const auto idx : partition.members[c]) {
            const auto& user = graph.node_id(idx);
            if (const auto mit = user_means.find(user); mit != user_means.end()) {
                means.push_back(mit->second);
            }
            if (const auto hit = home_towers.find(user); hit != home_towers.end()) {
                const auto tit = registry.find(hit->second);
                if (tit == registry.end()) {
                    throw std::invalid_argument("homophily: home tower '" + hit->second +
                                                "' missing from tower registry");
                }
                lat_sum += tit->second->lat;
                lon_sum += tit->second->lon;
                ++located;
            }
        }
        if (means.size() >= 2) s.cv_of_member_means = population_cv(means);
        if (located > 0) {
            s.centroid = LatLon{lat_sum / static_cast<double>(located),
                                lon_sum / static_cast<double>(located)};
        }
        result.push_back(std::move(s));
    }
    return result;
}

double weighted_cv(const std::vector<CommunityWealthStats>& stats) {
    double num = 0.0;
    double den = 0.0;
    for (const auto& s : stats) {
        if (!s.cv_of_member_means) continue;
        const double w = static_cast<double>(s.size);
        num += w * *s.cv_of_member_means;
        den += w;
    }
    if (den == 0.0) {
        throw std::invalid_argument("weighted_cv: no community with a defined CV");
    }
    return num / den;
}

HomophilyResult shuffled_baseline(const Partition& partition,
                                  const SocialGraph& graph,
                                  const std::map<std::string, double>& user_means,
                                  std::uint64_t n_shuffles,
                                  std::uint64_t seed) {
    if (n_shuffles < 1) throw std::invalid_argument("shuffled_baseline: need n_shuffles >= 1");
    const auto slots = collect_slots(partition, graph, user_means);

    HomophilyResult result;
    result.n_shuffles = n_shuffles;
    result.seed = seed;
    result.observed_weighted_cv = weighted_cv_of_assignment(slots, slots.means);

    rng::Engine eng(seed);
    std::vector<double> assigned = slots.means;
    std::vector<double> round_values;
    round_values.reserve(n_shuffles);
    for (std::uint64_t r = 0; r < n_shuffles; ++r) {
        rng::shuffle(eng, assigned);
        round_values.push_back(weighted_cv_of_assignment(slots, assigned));
    }
    double sum = 0.0;
    for (const double v : round_values) sum += v;
    result.baseline_weighted_cv = sum / static_cast<double>(round_values.size());
    double ss = 0.0;
    for (const double v : round_values) {
        const double d = v - result.baseline_weighted_cv;
        ss += d * d;
    }
    result.baseline_std = std::sqrt(ss / static_cast<double>(round_values.size()));
    return result;
}

double permuted_weighted_cv(const Partition& partition,
                            const SocialGraph& graph,
                            const std::map<std::string, double>& user_means,
                            const std::vector<std::size_t>& permutation) {
    const auto slots = collect_slots(partition, graph, user_means);
    if (permutation.size() != slots.means.size()) {
        throw std::invalid_argument("permuted_weighted_cv: permutation size mismatch");
    }
    std::vector<double> assigned(slots.means.size());
    std::vector<bool> used(slots.means.size(), false);
    for (std::size_t i = 0; i < permutation.size(); ++i) {
        const auto p = permutation[i];
        if (p >= slots.means.size() || used[p]) {
            throw std::invalid_argument("permuted_weighted_cv: not a permutation");
        }
        used[p] = true;
        assigned[i] = slots.means[p];
    }
    return weighted_cv_of_assignment(slots, assigned);
}

std::vector<TowerDiversity> map_community_diversity(
    const std::vector<CommunityWealthStats>& stats,
    const std::vector<TowerInfo>& towers) {
    if (towers.empty()) {
        throw std::invalid_argument("map_community_diversity: empty tower registry");
    }
    std::vector<const TowerInfo*> sorted;
    sorted.reserve(towers.size());
    for (const auto& t : towers) sorted.push_back(&t);
    std::sort(sorted.begin(), sorted.end(),
              [](const TowerInfo* x, const TowerInfo* y) { return x->tower_id < y->tower_id; });

    struct Acc {
        double num = 0.0;
        double den = 0.0;
        std::uint64_t count = 0;
    };
    std::map<std::string, Acc> by_tower;
    for (const auto& s : stats) {
        if (!s.cv_of_member_means || !s.centroid) continue;
        const TowerInfo* best = nullptr;
        double best_dist = 0.0;
        for (const auto* t : sorted) {
            const double d = haversine_km(s.centroid->lat, s.centroid->lon, t->lat, t->lon);
            if (best == nullptr || d < best_dist) {
                best = t;
                best_dist = d;
            }
        }
        auto& acc = by_tower[best->tower_id];
        const double w = static_cast<double>(s.size);
        acc.num += w * *s.cv_of_member_means;
        acc.den += w;
        ++acc.count;
    }
    std::vector<TowerDiversity> result;
    result.reserve(by_tower.size());
    for (const auto& [tower_id, acc] : by_tower) {
        result.push_back(TowerDiversity{tower_id, acc.num / acc.den, acc.count});
    }
    return result;
}

}  // namespace cdrkit
