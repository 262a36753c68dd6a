#include "cdrkit/communities.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "cdrkit/rng.hpp"

namespace cdrkit {

namespace {

// Louvain's working representation: aggregation introduces self-loops,
// which the public SocialGraph forbids. Self-loop weight s_i contributes
// 2*s_i to the node strength.
struct WeightedGraph {
    std::vector<std::vector<std::pair<std::int32_t, std::int64_t>>> adj;
    std::vector<std::int64_t> self_loop;
    std::vector<std::int64_t> strength;
    std::int64_t total_k = 0;  // sum of strengths = 2m

    std::size_t n() const { return adj.size(); }
};

WeightedGraph from_social(const SocialGraph& graph) {
    WeightedGraph g;
    const auto n = graph.n_nodes();
    g.adj.resize(n);
    g.self_loop.assign(n, 0);
    g.strength.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        g.adj[i] = graph.neighbors(static_cast<std::int32_t>(i));
        g.strength[i] = graph.strength(static_cast<std::int32_t>(i));
        g.total_k += g.strength[i];
    }
    return g;
}

double modularity_on(const WeightedGraph& g, const std::vector<std::int32_t>& labels,
                     double gamma) {
    std::int32_t n_comms = 0;
    for (auto c : labels) n_comms = std::max(n_comms, c + 1);
    std::vector<std::int64_t> in(n_comms, 0);
    std::vector<std::int64_t> tot(n_comms, 0);
    for (std::size_t i = 0; i < g.n(); ++i) {
        const auto c = labels[i];
        tot[c] += g.strength[i];
        in[c] += 2 * g.self_loop[i];
        for (const auto& [j, w] : g.adj[i]) {
            if (labels[j] == c) in[c] += w;
        }
    }
    const double m2 = static_cast<double>(g.total_k);
    double q = 0.0;
    for (std::int32_t c = 0; c < n_comms; ++c) {
        const double frac_tot = static_cast<double>(tot[c]) / m2;
        q += static_cast<double>(in[c]) / m2 - gamma * frac_tot * frac_tot;
    }
    return q;
}

struct LocalMoveResult {
    std::vector<std::int32_t> labels;
    std::uint64_t moves = 0;
    double delta_sum = 0.0;
};

LocalMoveResult local_move(const WeightedGraph& g, double gamma, rng::Engine& eng) {
    const auto n = g.n();
    LocalMoveResult res;
    res.labels.resize(n);
    std::iota(res.labels.begin(), res.labels.end(), 0);
    std::vector<std::int64_t> tot = g.strength;

    std::vector<std::int32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const double m2 = static_cast<double>(g.total_k);
    std::vector<std::pair<std::int32_t, std::int64_t>> cand;

    constexpr int kMaxPasses = 10000;
    for (int pass = 0; pass < kMaxPasses; ++pass) {
        rng::shuffle(eng, order);
        std::uint64_t pass_moves = 0;
        for (const auto i : order) {
            const auto& nbrs = g.adj[i];
            if (nbrs.empty()) continue;
            const std::int32_t a = res.labels[i];
            cand.clear();
            for (const auto& [j, w] : nbrs) cand.emplace_back(res.labels[j], w);
            std::sort(cand.begin(), cand.end());
            std::int64_t w_own = 0;
            const double k_i = static_cast<double>(g.strength[i]);
            const double tot_a_less = static_cast<double>(tot[a] - g.strength[i]);

            // Merge duplicate communities while scanning in ascending id order;
            // strict improvement keeps the smallest id on ties.
            std::int32_t best_comm = a;
            double best_gain = 0.0;
            std::size_t p = 0;
            std::vector<std::pair<std::int32_t, double>> links;
            while (p < cand.size()) {
                const std::int32_t c = cand[p].first;
                std::int64_t w_ic = 0;
                while (p < cand.size() && cand[p].first == c) {
                    w_ic += cand[p].second;
                    ++p;
                }
                if (c == a) {
                    w_own = w_ic;
                } else {
                    links.emplace_back(c, static_cast<double>(w_ic));
                }
            }
            for (const auto& [c, w_ic] : links) {
                const double gain =
                    (w_ic - static_cast<double>(w_own)) -
                    gamma * k_i * (static_cast<double>(tot[c]) - tot_a_less) / m2;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_comm = c;
                }
            }
            if (best_comm != a) {
                tot[a] -= g.strength[i];
                tot[best_comm] += g.strength[i];
                res.labels[i] = best_comm;
                ++pass_moves;
                res.delta_sum += 2.0 * best_gain / m2;
            }
        }
        res.moves += pass_moves;
        if (pass_moves == 0) break;
    }
    return res;
}

struct Aggregated {
    WeightedGraph graph;
    std::vector<std::int32_t> mapping;  // node of the input graph -> new node
};

Aggregated aggregate(const WeightedGraph& g, const std::vector<std::int32_t>& labels) {
    std::vector<std::int32_t> distinct = labels;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<std::int32_t> compact(g.n(), -1);
    for (std::size_t c = 0; c < distinct.size(); ++c) {
        compact[distinct[c]] = static_cast<std::int32_t>(c);
    }

    Aggregated out;
    out.mapping.resize(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) out.mapping[i] = compact[labels[i]];

    const auto k = distinct.size();
    out.graph.adj.resize(k);
    out.graph.self_loop.assign(k, 0);
    out.graph.strength.assign(k, 0);
    std::map<std::pair<std::int32_t, std::int32_t>, std::int64_t> cross;
    for (std::size_t i = 0; i < g.n(); ++i) {
        const auto ci = out.mapping[i];
        out.graph.self_loop[ci] += g.self_loop[i];
        for (const auto& [j, w] : g.adj[i]) {
            if (static_cast<std::size_t>(j) < i) continue;  // each undirected edge once
            const auto cj = out.mapping[j];
            if (ci == cj) {
                out.graph.self_loop[ci] += w;
            } else {
                cross[{std::min(ci, cj), std::max(ci, cj)}] += w;
            }
        }
    }
    for (const auto& [pair, w] : cross) {
        out.graph.adj[pair.first].emplace_back(pair.second, w);
        out.graph.adj[pair.second].emplace_back(pair.first, w);
    }
    for (std::size_t c = 0; c < k; ++c) {
        std::sort(out.graph.adj[c].begin(), out.graph.adj[c].end());
        std::int64_t s = 2 * out.graph.self_loop[c];
        for (const auto& [j, w] : out.graph.adj[c]) s += w;
        out.graph.strength[c] = s;
        out.graph.total_k += s;
    }
    return out;
}

}  // namespace

Partition Partition::from_labels(const SocialGraph& graph,
                                 const std::vector<std::int32_t>& labels) {
    if (labels.size() != graph.n_nodes()) {
        throw std::invalid_argument("Partition: label count != node count");
    }
    std::map<std::int32_t, std::vector<std::int32_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        groups[labels[i]].push_back(static_cast<std::int32_t>(i));
    }
    std::vector<std::vector<std::int32_t>> member_lists;
    member_lists.reserve(groups.size());
    for (auto& [label, nodes] : groups) member_lists.push_back(std::move(nodes));
    std::sort(member_lists.begin(), member_lists.end(),
              [](const std::vector<std::int32_t>& x, const std::vector<std::int32_t>& y) {
                  if (x.size() != y.size()) return x.size() > y.size();
                  return x.front() < y.front();
              });

    Partition part;
    part.members = std::move(member_lists);
    part.community_of.assign(graph.n_nodes(), -1);
    part.sigma_in.assign(part.members.size(), 0);
    part.sigma_tot.assign(part.members.size(), 0);
    for (std::size_t c = 0; c < part.members.size(); ++c) {
        for (const auto i : part.members[c]) {
            part.community_of[i] = static_cast<std::int32_t>(c);
            part.sigma_tot[c] += graph.strength(i);
        }
    }
    for (const auto& e : graph.edges()) {
        if (part.community_of[e.a] == part.community_of[e.b]) {
            part.sigma_in[part.community_of[e.a]] += 2 * e.weight;
        }
    }
    return part;
}

double modularity(const SocialGraph& graph, const Partition& partition, double gamma) {
    if (graph.n_nodes() == 0) throw std::invalid_argument("modularity: empty graph");
    if (graph.total_weight() == 0) throw std::invalid_argument("modularity: graph has no edges");
    if (!(gamma > 0.0)) throw std::invalid_argument("modularity: gamma must be positive");
    if (partition.community_of.size() != graph.n_nodes()) {
        throw std::invalid_argument("modularity: partition does not cover the graph");
    }
    const auto n_comms = partition.n_communities();
    std::vector<std::int64_t> in(n_comms, 0);
    std::vector<std::int64_t> tot(n_comms, 0);
    for (std::size_t i = 0; i < graph.n_nodes(); ++i) {
        const auto c = partition.community_of[i];
        if (c < 0 || static_cast<std::size_t>(c) >= n_comms) {
            throw std::invalid_argument("modularity: community id out of range");
        }
        tot[c] += graph.strength(static_cast<std::int32_t>(i));
    }
    for (const auto& e : graph.edges()) {
        if (partition.community_of[e.a] == partition.community_of[e.b]) {
            in[partition.community_of[e.a]] += 2 * e.weight;
        }
    }
    const double m2 = 2.0 * static_cast<double>(graph.total_weight());
    double q = 0.0;
    for (std::size_t c = 0; c < n_comms; ++c) {
        const double frac_tot = static_cast<double>(tot[c]) / m2;
        q += static_cast<double>(in[c]) / m2 - gamma * frac_tot * frac_tot;
    }
    return q;
}

Partition louvain(const SocialGraph& graph, double gamma, std::uint64_t seed,
                  LouvainTrace* trace) {
    if (graph.n_nodes() == 0) throw std::invalid_argument("louvain: empty graph");
    if (!(gamma > 0.0)) throw std::invalid_argument("louvain: gamma must be positive");

    std::vector<std::int32_t> flat(graph.n_nodes());
    std::iota(flat.begin(), flat.end(), 0);
    if (graph.total_weight() == 0) return Partition::from_labels(graph, flat);

    WeightedGraph g = from_social(graph);
    rng::Engine eng(seed);
    std::vector<std::int32_t> singleton(g.n());
    std::iota(singleton.begin(), singleton.end(), 0);
    double q_prev = modularity_on(g, singleton, gamma);

    constexpr double kMinGain = 1e-9;
    int level = 0;
    while (true) {
        const auto res = local_move(g, gamma, eng);
        const double q_local = modularity_on(g, res.labels, gamma);
        if (trace) {
            trace->phases.push_back(
                {level, 'L', q_prev, q_local, res.delta_sum, res.moves});
        }
        if (res.moves == 0) break;

        auto agg = aggregate(g, res.labels);
        for (auto& f : flat) f = agg.mapping[f];
        std::vector<std::int32_t> agg_singleton(agg.graph.n());
        std::iota(agg_singleton.begin(), agg_singleton.end(), 0);
        const double q_agg = modularity_on(agg.graph, agg_singleton, gamma);
        if (trace) trace->phases.push_back({level, 'A', q_local, q_agg, 0.0, 0});

        const bool converged = q_local - q_prev < kMinGain;
        g = std::move(agg.graph);
        q_prev = q_agg;
        ++level;
        if (converged) break;
    }
    return Partition::from_labels(graph, flat);
}

}  // namespace cdrkit
