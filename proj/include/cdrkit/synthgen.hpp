#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdrkit/records.hpp"

namespace cdrkit {

struct SynthConfig {
    std::uint64_t seed = 1;
    std::uint64_t n_users = 0;
    std::uint64_t n_towers = 0;
    int n_months = 0;
    std::vector<std::uint64_t> planted_blocks;
    double p_in = 0.0;
    double p_out = 0.0;
    // One mean purchase level per block, minor units.
    std::vector<double> income_levels;
    // 1 = a user's income level is their block's level; 0 = level drawn
    // uniformly from income_levels regardless of block.
    double homophily_strength = 1.0;
    double purchase_cv = 0.5;
    std::uint64_t n_service_numbers = 0;
    std::uint64_t service_fanout = 1500;
    // Months since 1970-01; 648 = 2024-01.
    int start_month_index = 648;

    void validate() const;
};

struct PlantedUser {
    std::string user_id;
    std::uint32_t block_id = 0;
    double income_level = 0.0;
    std::string home_tower_id;
};

struct GroundTruth {
    std::vector<PlantedUser> users;
    std::vector<std::string> service_ids;
};

struct SynthDataset {
    std::vector<CdrRecord> cdr;
    std::vector<TopUpRecord> topups;
    std::vector<TowerInfo> towers;
    GroundTruth truth;
    ObservationWindow window;
    std::vector<std::string> warnings;
};

// Deterministic for a fixed config. Every intra-block contacted pair gets
// at least one event in every month, so the monthly-persistence edge rule
// retains it; roughly half the inter-block contacted pairs fail the rule.
// Each user initiates at least one event per month from their home tower,
// which makes the home tower recoverable as the modal initiated tower.
SynthDataset generate(const SynthConfig& config);

}  // namespace cdrkit
