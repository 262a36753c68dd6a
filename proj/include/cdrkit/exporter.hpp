#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cdrkit/communities.hpp"
#include "cdrkit/homophily.hpp"
#include "cdrkit/ingest.hpp"
#include "cdrkit/purchases.hpp"
#include "cdrkit/records.hpp"
#include "cdrkit/socialgraph.hpp"
#include "cdrkit/synthgen.hpp"

namespace cdrkit {

// Fixed 6-decimal rendering used by every CSV/GeoJSON export.
std::string fmt6(double v);
// Shortest exact round-trip rendering, for intermediate files and reports.
std::string fmt_full(double v);

std::uint64_t fnv1a_file(const std::filesystem::path& path);

void write_cdr_csv(const std::filesystem::path& path, const std::vector<CdrRecord>& records);
void write_topup_csv(const std::filesystem::path& path, const std::vector<TopUpRecord>& records);
void write_towers_csv(const std::filesystem::path& path, const std::vector<TowerInfo>& towers);
void write_ground_truth_csv(const std::filesystem::path& path, const GroundTruth& truth);
void write_rejection_report(const std::filesystem::path& path, const RejectionReport& report);

// Union of stat-bearing and home-towered users, one row each, sorted by
// user_id; empty fields where a value is undefined. Full precision.
void write_user_stats_csv(const std::filesystem::path& path,
                          const std::vector<UserPurchaseStats>& stats,
                          const std::map<std::string, std::string>& home_towers);
struct UserStatsFile {
    std::vector<UserPurchaseStats> stats;
    std::map<std::string, std::string> home_towers;
};
UserStatsFile read_user_stats_csv(const std::filesystem::path& path);

void write_indicators_csv(const std::filesystem::path& path,
                          const std::vector<RegionIndicator>& indicators);
std::vector<RegionIndicator> read_indicators_csv(const std::filesystem::path& path);

void write_graph_csv(const std::filesystem::path& path, const SocialGraph& graph);
// Nodes are the ids appearing on edges; isolates do not survive the file.
SocialGraph read_graph_csv(const std::filesystem::path& path);

void write_flagged_csv(const std::filesystem::path& path, const ServiceFlagReport& report);

void write_communities_csv(const std::filesystem::path& path, const SocialGraph& graph,
                           const Partition& partition);
std::map<std::string, std::int32_t> read_communities_csv(const std::filesystem::path& path);

void write_community_map_csv(const std::filesystem::path& path,
                             const std::vector<TowerDiversity>& diversity);
std::vector<TowerDiversity> read_community_map_csv(const std::filesystem::path& path);

void write_homophily_json(const std::filesystem::path& path, const HomophilyResult& result);

// One point feature per tower carrying at least one defined indicator;
// properties and coordinates rounded to 6 decimals; ordered by tower_id.
void export_geojson(const std::filesystem::path& path,
                    const std::vector<RegionIndicator>& indicators,
                    const std::vector<TowerDiversity>& diversity,
                    const std::vector<TowerInfo>& towers);

struct SummaryData {
    double cfa_fraction_cv_le_0_62 = 0.0;
    double cfa_fraction_cv_le_1_00 = 0.0;
    double pooled_cv = 0.0;
    std::uint64_t graph_nodes = 0;
    std::uint64_t graph_edges = 0;
    double avg_local_clustering = 0.0;
    double avg_local_clustering_shuffled = 0.0;
    std::uint64_t n_communities = 0;
    double observed_weighted_cv = 0.0;
    double baseline_weighted_cv = 0.0;
};
void export_summary(const std::filesystem::path& path, const SummaryData& data);
SummaryData read_summary_json(const std::filesystem::path& path);

}  // namespace cdrkit
