#include "cdrkit/socialgraph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "cdrkit/rng.hpp"

namespace cdrkit {

namespace {

std::uint64_t pack_pair(std::int32_t a, std::int32_t b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(b));
}

}  // namespace

SocialGraph::SocialGraph(std::vector<std::string> node_ids, std::vector<Edge> edges)
    : node_ids_(std::move(node_ids)), edges_(std::move(edges)) {
    {
        std::unordered_set<std::string_view> seen;
        seen.reserve(node_ids_.size());
        for (const auto& id : node_ids_) {
            if (!seen.insert(id).second) {
                throw std::invalid_argument("SocialGraph: duplicate node id '" + id + "'");
            }
        }
    }
    const auto n = static_cast<std::int64_t>(node_ids_.size());
    for (auto& e : edges_) {
        if (e.a < 0 || e.b < 0 || e.a >= n || e.b >= n) {
            throw std::invalid_argument("SocialGraph: edge index out of range");
        }
        if (e.a == e.b) throw std::invalid_argument("SocialGraph: self-loop");
        if (e.weight <= 0) throw std::invalid_argument("SocialGraph: non-positive edge weight");
        if (e.a > e.b) std::swap(e.a, e.b);
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& x, const Edge& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
    for (std::size_t i = 1; i < edges_.size(); ++i) {
        if (edges_[i - 1].a == edges_[i].a && edges_[i - 1].b == edges_[i].b) {
            throw std::invalid_argument("SocialGraph: duplicate edge");
        }
    }
    adjacency_.assign(node_ids_.size(), {});
    strengths_.assign(node_ids_.size(), 0);
    for (const auto& e : edges_) {
        adjacency_[e.a].emplace_back(e.b, e.weight);
        adjacency_[e.b].emplace_back(e.a, e.weight);
        strengths_[e.a] += e.weight;
        strengths_[e.b] += e.weight;
        total_weight_ += e.weight;
    }
    for (auto& nbrs : adjacency_) {
        std::sort(nbrs.begin(), nbrs.end());
    }
}

bool SocialGraph::has_edge(std::int32_t a, std::int32_t b) const {
    if (a == b) return false;
    const auto& nbrs = adjacency_[a];
    const auto it = std::lower_bound(
        nbrs.begin(), nbrs.end(), b,
        [](const std::pair<std::int32_t, std::int64_t>& p, std::int32_t v) { return p.first < v; });
    return it != nbrs.end() && it->first == b;
}

std::set<std::string> ServiceFlagReport::flagged_ids() const {
    std::set<std::string> ids;
    for (const auto& f : flags) ids.insert(f.user_id);
    return ids;
}

ServiceFlagReport flag_service_numbers(const std::vector<CdrRecord>& records,
                                       const ServiceFilterConfig& config) {
    if (config.max_contacts == 0) {
        throw std::invalid_argument("flag_service_numbers: max_contacts must be positive");
    }
    if (!(config.asymmetry_cutoff > 0.0) || config.asymmetry_cutoff > 1.0) {
        throw std::invalid_argument("flag_service_numbers: asymmetry_cutoff must be in (0,1]");
    }
    std::unordered_map<std::string, std::unordered_set<std::string>> out_contacts;
    std::unordered_map<std::string, std::unordered_set<std::string>> in_contacts;
    for (const auto& rec : records) {
        out_contacts[rec.caller_id].insert(rec.callee_id);
        in_contacts[rec.callee_id].insert(rec.caller_id);
    }
    std::set<std::string> all_ids;
    for (const auto& [id, contacts] : out_contacts) all_ids.insert(id);
    for (const auto& [id, contacts] : in_contacts) all_ids.insert(id);

    ServiceFlagReport report;
    for (const auto& id : all_ids) {
        const auto out_it = out_contacts.find(id);
        const auto in_it = in_contacts.find(id);
        const std::uint64_t d_out = out_it == out_contacts.end() ? 0 : out_it->second.size();
        const std::uint64_t d_in = in_it == in_contacts.end() ? 0 : in_it->second.size();

        std::uint64_t distinct_total;
        if (out_it == out_contacts.end()) {
            distinct_total = d_in;
        } else if (in_it == in_contacts.end()) {
            distinct_total = d_out;
        } else {
            std::unordered_set<std::string> merged = out_it->second;
            merged.insert(in_it->second.begin(), in_it->second.end());
            distinct_total = merged.size();
        }

        const bool too_many = distinct_total > config.max_contacts;
        const std::uint64_t activity = d_out + d_in;
        const double asym =
            static_cast<double>(d_out > d_in ? d_out - d_in : d_in - d_out) /
            static_cast<double>(std::max<std::uint64_t>(1, activity));
        const bool lopsided = asym > config.asymmetry_cutoff && activity >= config.activity_floor;
        if (!too_many && !lopsided) continue;

        ServiceFlag flag;
        flag.user_id = id;
        flag.distinct_out = d_out;
        flag.distinct_in = d_in;
        if (too_many && lopsided) {
            flag.reason = "max-contacts+asymmetry";
        } else if (too_many) {
            flag.reason = "max-contacts";
        } else {
            flag.reason = "asymmetry";
        }
        report.flags.push_back(std::move(flag));
    }
    return report;
}

std::vector<CdrRecord> remove_flagged(const std::vector<CdrRecord>& records,
                                      const ServiceFlagReport& report) {
    std::unordered_set<std::string> flagged;
    for (const auto& f : report.flags) flagged.insert(f.user_id);
    std::vector<CdrRecord> kept;
    kept.reserve(records.size());
    for (const auto& rec : records) {
        if (flagged.count(rec.caller_id) || flagged.count(rec.callee_id)) continue;
        kept.push_back(rec);
    }
    return kept;
}

SocialGraph build_graph(const std::vector<CdrRecord>& records,
                        const ObservationWindow& window,
                        int min_months) {
    const int n_months = window.month_count();
    if (n_months > 64) {
        throw std::invalid_argument("build_graph: windows longer than 64 months are unsupported");
    }
    if (min_months < 1 || min_months > n_months) {
        throw std::invalid_argument("build_graph: min_months must be in [1, window months]");
    }

    std::set<std::string> id_set;
    for (const auto& rec : records) {
        id_set.insert(rec.caller_id);
        id_set.insert(rec.callee_id);
    }
    std::vector<std::string> node_ids(id_set.begin(), id_set.end());
    std::unordered_map<std::string_view, std::int32_t> index;
    index.reserve(node_ids.size());
    for (std::size_t i = 0; i < node_ids.size(); ++i) {
        index.emplace(node_ids[i], static_cast<std::int32_t>(i));
    }

    struct PairAcc {
        std::uint64_t month_mask = 0;
        std::int64_t events = 0;
    };
    std::unordered_map<std::uint64_t, PairAcc> pairs;
    pairs.reserve(records.size() / 4 + 16);
    for (const auto& rec : records) {
        if (!window.contains(rec.timestamp)) {
            throw std::invalid_argument("build_graph: record outside observation window");
        }
        std::int32_t u = index.at(rec.caller_id);
        std::int32_t v = index.at(rec.callee_id);
        if (u == v) throw std::invalid_argument("build_graph: self-loop record");
        if (u > v) std::swap(u, v);
        auto& acc = pairs[pack_pair(u, v)];
        acc.month_mask |= std::uint64_t{1} << window.month_offset(rec.timestamp);
        ++acc.events;
    }

    std::vector<Edge> edges;
    for (const auto& [key, acc] : pairs) {
        if (std::popcount(acc.month_mask) < min_months) continue;
        Edge e;
        e.a = static_cast<std::int32_t>(key >> 32);
        e.b = static_cast<std::int32_t>(key & 0xffffffffu);
        e.weight = acc.events;
        edges.push_back(e);
    }
    return SocialGraph(std::move(node_ids), std::move(edges));
}

double avg_local_clustering(const SocialGraph& graph) {
    const auto n = graph.n_nodes();
    if (n == 0) throw std::invalid_argument("avg_local_clustering: empty graph");
    double sum = 0.0;
    std::vector<std::int32_t> nbrs_u;
    for (std::size_t u = 0; u < n; ++u) {
        const auto& adj_u = graph.neighbors(static_cast<std::int32_t>(u));
        const auto k = adj_u.size();
        if (k < 2) continue;
        nbrs_u.clear();
        for (const auto& [v, w] : adj_u) nbrs_u.push_back(v);
        std::uint64_t closed_twice = 0;
        for (const auto& [v, w] : adj_u) {
            const auto& adj_v = graph.neighbors(v);
            std::size_t i = 0, j = 0;
            while (i < nbrs_u.size() && j < adj_v.size()) {
                if (nbrs_u[i] < adj_v[j].first) {
                    ++i;
                } else if (nbrs_u[i] > adj_v[j].first) {
                    ++j;
                } else {
                    ++closed_twice;
                    ++i;
                    ++j;
                }
            }
        }
        const double possible = 0.5 * static_cast<double>(k) * static_cast<double>(k - 1);
        sum += 0.5 * static_cast<double>(closed_twice) / possible;
    }
    return sum / static_cast<double>(n);
}

SocialGraph degree_preserving_shuffle(const SocialGraph& graph,
                                      std::uint64_t seed,
                                      double n_swaps_factor) {
    if (graph.n_edges() < 2) {
        throw std::invalid_argument("degree_preserving_shuffle: need at least 2 edges");
    }
    if (!(n_swaps_factor > 0.0)) {
        throw std::invalid_argument("degree_preserving_shuffle: n_swaps_factor must be positive");
    }
    std::vector<Edge> edges = graph.edges();
    std::unordered_set<std::uint64_t> edge_set;
    edge_set.reserve(edges.size() * 2);
    for (const auto& e : edges) edge_set.insert(pack_pair(e.a, e.b));

    rng::Engine eng(seed);
    const auto n_edges = static_cast<std::uint64_t>(edges.size());
    const auto attempts =
        static_cast<std::uint64_t>(n_swaps_factor * static_cast<double>(n_edges));
    for (std::uint64_t t = 0; t < attempts; ++t) {
        const auto i = rng::bounded(eng, n_edges);
        const auto j = rng::bounded(eng, n_edges);
        const bool crossed = rng::bounded(eng, 2) == 1;
        if (i == j) continue;
        Edge& e1 = edges[i];
        Edge& e2 = edges[j];
        // (u,v)+(x,y) -> (u,x)+(v,y) or (u,y)+(v,x)
        const std::int32_t u = e1.a, v = e1.b;
        const std::int32_t x = crossed ? e2.b : e2.a;
        const std::int32_t y = crossed ? e2.a : e2.b;
        if (u == x || v == y) continue;
        const std::int32_t n1a = std::min(u, x), n1b = std::max(u, x);
        const std::int32_t n2a = std::min(v, y), n2b = std::max(v, y);
        const std::uint64_t k1 = pack_pair(n1a, n1b);
        const std::uint64_t k2 = pack_pair(n2a, n2b);
        if (k1 == k2 || edge_set.count(k1) || edge_set.count(k2)) continue;
        edge_set.erase(pack_pair(e1.a, e1.b));
        edge_set.erase(pack_pair(e2.a, e2.b));
        edge_set.insert(k1);
        edge_set.insert(k2);
        e1.a = n1a;
        e1.b = n1b;
        e2.a = n2a;
        e2.b = n2b;
    }
    return SocialGraph(graph.node_ids(), std::move(edges));
}

}  // namespace cdrkit
