#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdrkit/communities.hpp"
#include "cdrkit/records.hpp"
#include "cdrkit/socialgraph.hpp"

namespace cdrkit {

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;

    bool operator==(const LatLon&) const = default;
};

struct CommunityWealthStats {
    std::int32_t community_id = 0;
    std::uint64_t size = 0;
    // Defined when at least 2 members carry purchase means.
    std::optional<double> cv_of_member_means;
    // Arithmetic mean of member home-tower coordinates; absent when no
    // member has a home tower.
    std::optional<LatLon> centroid;
};

struct HomophilyResult {
    double observed_weighted_cv = 0.0;
    double baseline_weighted_cv = 0.0;
    double baseline_std = 0.0;
    std::uint64_t n_shuffles = 0;
    std::uint64_t seed = 0;
};

struct TowerDiversity {
    std::string tower_id;
    double diversity_value = 0.0;
    std::uint64_t n_communities = 0;

    bool operator==(const TowerDiversity&) const = default;
};

double haversine_km(double lat1, double lon1, double lat2, double lon2);

// One entry per community, ordered by community id. Home towers must
// resolve in the registry.
std::vector<CommunityWealthStats> community_wealth_stats(
    const Partition& partition,
    const SocialGraph& graph,
    const std::map<std::string, double>& user_means,
    const std::map<std::string, std::string>& home_towers,
    const std::vector<TowerInfo>& towers);

// Community-size-weighted average of the defined per-community CVs.
double weighted_cv(const std::vector<CommunityWealthStats>& stats);

// R rounds of uniformly permuting the purchase means among the graph's
// mean-bearing nodes, recomputing the weighted CV each time.
HomophilyResult shuffled_baseline(const Partition& partition,
                                  const SocialGraph& graph,
                                  const std::map<std::string, double>& user_means,
                                  std::uint64_t n_shuffles,
                                  std::uint64_t seed);

// Test hook behind shuffled_baseline: applies an explicit permutation to
// the means of the mean-bearing nodes taken in ascending node order;
// permutation[i] indexes the mean assigned to the i-th such node.
double permuted_weighted_cv(const Partition& partition,
                            const SocialGraph& graph,
                            const std::map<std::string, double>& user_means,
                            const std::vector<std::size_t>& permutation);

// Attributes each community's CV to the tower nearest its centroid
// (ties to the smaller tower_id), then size-weights per tower.
std::vector<TowerDiversity> map_community_diversity(
    const std::vector<CommunityWealthStats>& stats,
    const std::vector<TowerInfo>& towers);

}  // namespace cdrkit
