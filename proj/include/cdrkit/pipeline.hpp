#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "cdrkit/records.hpp"
#include "cdrkit/socialgraph.hpp"
#include "cdrkit/synthgen.hpp"

namespace cdrkit {

// Effective settings for one pipeline run: a flat key=value config file
// overlaid with command-line flags (flags win).
struct PipelineConfig {
    std::filesystem::path out_dir = "out";
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> louvain_seed;
    std::optional<std::uint64_t> shuffle_seed;
    std::optional<std::uint64_t> homophily_seed;
    double resolution = 1.0;
    int min_months = 0;  // 0 = every month of the window
    std::uint64_t min_users = 20;
    ServiceFilterConfig service;
    std::uint64_t shuffles = 100;
    double swap_factor = 10.0;
    std::optional<std::string> cdr_path;
    std::optional<std::string> topup_path;
    std::optional<std::string> towers_path;
    std::optional<std::string> window_start;  // ISO-8601 UTC
    std::optional<int> window_months;
    SynthConfig synth;  // active when synth.n_users > 0

    bool synth_configured() const { return synth.n_users > 0; }
    std::filesystem::path cdr_file() const;
    std::filesystem::path topup_file() const;
    std::filesystem::path towers_file() const;
    ObservationWindow window() const;
    int effective_min_months(const ObservationWindow& w) const;
    std::uint64_t louvain_seed_effective() const { return louvain_seed.value_or(seed); }
    std::uint64_t shuffle_seed_effective() const { return shuffle_seed.value_or(seed); }
    std::uint64_t homophily_seed_effective() const { return homophily_seed.value_or(seed); }
    // Stable string rendering of every effective setting, echoed into the
    // run manifest.
    std::map<std::string, std::string> echo() const;
};

struct FlagOverrides {
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<double> resolution;
    std::optional<int> min_months;
    std::optional<std::uint64_t> min_users;
    std::optional<std::uint64_t> max_contacts;
    std::optional<double> asymmetry;
    std::optional<std::uint64_t> shuffles;
};

// Reads the key=value file (when given), applies flag overrides, and
// validates. Unknown keys and malformed values are fatal.
PipelineConfig load_config(const std::optional<std::filesystem::path>& config_file,
                           const FlagOverrides& flags);

// Runs one of: generate, validate, stats, graph, communities, homophily,
// export, all. Writes run_manifest.json on success. Throws
// std::runtime_error on fatal input problems.
void run_subcommand(const std::string& name, const PipelineConfig& config);

}  // namespace cdrkit
