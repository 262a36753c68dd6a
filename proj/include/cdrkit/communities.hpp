#pragma once

#include <cstdint>
#include <vector>

#include "cdrkit/socialgraph.hpp"

namespace cdrkit {

// Node-to-community assignment with dense community ids, ordered by
// decreasing size and then by smallest member index.
struct Partition {
    std::vector<std::int32_t> community_of;
    std::vector<std::vector<std::int32_t>> members;
    // Adjacency-matrix sums per community: sigma_in counts each internal
    // edge twice; sigma_tot sums member strengths.
    std::vector<std::int64_t> sigma_in;
    std::vector<std::int64_t> sigma_tot;

    std::size_t n_communities() const { return members.size(); }

    // Accepts arbitrary (possibly sparse) labels and renumbers them.
    static Partition from_labels(const SocialGraph& graph,
                                 const std::vector<std::int32_t>& labels);
};

// Q(gamma) = sum_c [ sigma_in(c)/(2m) - gamma * (sigma_tot(c)/(2m))^2 ].
double modularity(const SocialGraph& graph, const Partition& partition, double gamma);

struct LouvainPhase {
    int level = 0;
    char kind = 'L';  // 'L' local-move, 'A' aggregation
    double q_before = 0.0;
    double q_after = 0.0;
    double accepted_delta_sum = 0.0;
    std::uint64_t moves = 0;
};

struct LouvainTrace {
    std::vector<LouvainPhase> phases;
};

// Greedy modularity maximization: seed-shuffled local moves (ties broken
// toward the smallest community id) alternating with aggregation, stopping
// once a level improves Q by less than 1e-9.
Partition louvain(const SocialGraph& graph, double gamma, std::uint64_t seed,
                  LouvainTrace* trace = nullptr);

}  // namespace cdrkit
