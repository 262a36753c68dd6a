#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "cdrkit/records.hpp"

namespace cdrkit {

struct Edge {
    std::int32_t a = 0;
    std::int32_t b = 0;
    std::int64_t weight = 0;

    bool operator==(const Edge&) const = default;
};

// Weighted undirected simple graph over string-keyed users. Node indices
// are dense positions into node_ids; build_graph assigns them in
// lexicographic id order so the result is independent of record ordering.
class SocialGraph {
public:
    SocialGraph() = default;
    // node_ids must be unique; edges must reference valid indices, contain
    // no self-loops or duplicate pairs, and carry positive weights.
    SocialGraph(std::vector<std::string> node_ids, std::vector<Edge> edges);

    std::size_t n_nodes() const { return node_ids_.size(); }
    std::size_t n_edges() const { return edges_.size(); }
    std::int64_t total_weight() const { return total_weight_; }

    const std::vector<std::string>& node_ids() const { return node_ids_; }
    const std::string& node_id(std::int32_t idx) const { return node_ids_[idx]; }
    // Edges normalized to a < b, sorted by (a, b).
    const std::vector<Edge>& edges() const { return edges_; }

    const std::vector<std::pair<std::int32_t, std::int64_t>>& neighbors(std::int32_t idx) const {
        return adjacency_[idx];
    }
    std::size_t degree(std::int32_t idx) const { return adjacency_[idx].size(); }
    std::int64_t strength(std::int32_t idx) const { return strengths_[idx]; }
    bool has_edge(std::int32_t a, std::int32_t b) const;

private:
    std::vector<std::string> node_ids_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<std::int32_t, std::int64_t>>> adjacency_;
    std::vector<std::int64_t> strengths_;
    std::int64_t total_weight_ = 0;
};

struct ServiceFilterConfig {
    std::uint64_t max_contacts = 1000;
    double asymmetry_cutoff = 0.9;
    std::uint64_t activity_floor = 100;
};

struct ServiceFlag {
    std::string user_id;
    std::uint64_t distinct_out = 0;
    std::uint64_t distinct_in = 0;
    std::string reason;

    bool operator==(const ServiceFlag&) const = default;
};

struct ServiceFlagReport {
    std::vector<ServiceFlag> flags;  // ordered by user_id

    std::set<std::string> flagged_ids() const;
};

// Flags a node when its distinct counterparties across both directions
// exceed max_contacts, or when |d_out - d_in| / max(1, d_out + d_in)
// exceeds asymmetry_cutoff with d_out + d_in >= activity_floor.
ServiceFlagReport flag_service_numbers(const std::vector<CdrRecord>& records,
                                       const ServiceFilterConfig& config);

// Drops every record in which a flagged id appears on either side.
std::vector<CdrRecord> remove_flagged(const std::vector<CdrRecord>& records,
                                      const ServiceFlagReport& report);

// Edge (u,v) exists iff events between u and v (either direction) cover at
// least min_months distinct calendar months; weight = total event count.
// Nodes are all ids appearing in the records, so isolates are retained.
SocialGraph build_graph(const std::vector<CdrRecord>& records,
                        const ObservationWindow& window,
                        int min_months);

// Mean over all nodes of the unweighted local clustering coefficient;
// nodes with degree < 2 contribute 0.
double avg_local_clustering(const SocialGraph& graph);

// Double-edge-swap rewiring: floor(n_swaps_factor * |E|) attempted swaps,
// rejecting any that would create a self-loop or multi-edge. Degree
// sequence is preserved exactly; each edge keeps its weight through swaps.
SocialGraph degree_preserving_shuffle(const SocialGraph& graph,
                                      std::uint64_t seed,
                                      double n_swaps_factor);

}  // namespace cdrkit
