#include "cdrkit/exporter.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "cdrkit/csv.hpp"
#include "cdrkit/timeutil.hpp"

namespace cdrkit {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open input file: " + path.string());
    return in;
}

void expect_header(std::istream& in, std::string_view expected,
                   const std::filesystem::path& path) {
    std::string line;
    if (!std::getline(in, line) || csv::strip_cr(line) != expected) {
        throw std::runtime_error(path.string() + ": malformed header, expected '" +
                                 std::string(expected) + "'");
    }
}

double round6(double v) { return std::round(v * 1e6) / 1e6; }

void write_json(const std::filesystem::path& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    finish(out, path);
}

json load_json(const std::filesystem::path& path) {
    auto in = open_in(path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path.string() + ": invalid JSON: " + e.what());
    }
    return j;
}

}  // namespace

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::uint64_t hash = 14695981039346656037ULL;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        const auto got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 1099511628211ULL;
        }
    }
    return hash;
}

void write_cdr_csv(const std::filesystem::path& path, const std::vector<CdrRecord>& records) {
    auto out = open_out(path);
    out << kCdrHeader << '\n';
    for (const auto& r : records) {
        out << format_utc(r.timestamp) << ',' << r.caller_id << ',' << r.callee_id << ','
            << r.tower_id << ',' << (r.kind == CommKind::Call ? "CALL" : "SMS") << ','
            << r.duration_s << '\n';
    }
    finish(out, path);
}

void write_topup_csv(const std::filesystem::path& path, const std::vector<TopUpRecord>& records) {
    auto out = open_out(path);
    out << kTopUpHeader << '\n';
    for (const auto& r : records) {
        out << format_utc(r.timestamp) << ',' << r.user_id << ',' << r.amount_minor << '\n';
    }
    finish(out, path);
}

void write_towers_csv(const std::filesystem::path& path, const std::vector<TowerInfo>& towers) {
    auto out = open_out(path);
    out << kTowersHeader << '\n';
    for (const auto& t : towers) {
        out << t.tower_id << ',' << fmt6(t.lat) << ',' << fmt6(t.lon) << '\n';
    }
    finish(out, path);
}

void write_ground_truth_csv(const std::filesystem::path& path, const GroundTruth& truth) {
    auto out = open_out(path);
    out << "user_id,block_id,income_level,home_tower_id\n";
    for (const auto& u : truth.users) {
        out << u.user_id << ',' << u.block_id << ',' << fmt6(u.income_level) << ','
            << u.home_tower_id << '\n';
    }
    finish(out, path);
}

void write_rejection_report(const std::filesystem::path& path, const RejectionReport& report) {
    auto out = open_out(path);
    out << "reason,count\n";
    for (const auto& [reason, count] : report.by_reason) {
        out << reason << ',' << count << '\n';
    }
    out << "total-rows," << report.total_rows << '\n';
    out << "retained," << report.retained << '\n';
    out << "rejected," << report.rejected << '\n';
    finish(out, path);
}

void write_user_stats_csv(const std::filesystem::path& path,
                          const std::vector<UserPurchaseStats>& stats,
                          const std::map<std::string, std::string>& home_towers) {
    std::map<std::string, const UserPurchaseStats*> by_user;
    for (const auto& s : stats) by_user.emplace(s.user_id, &s);
    std::set<std::string> all_users;
    for (const auto& s : stats) all_users.insert(s.user_id);
    for (const auto& [user, tower] : home_towers) all_users.insert(user);

    auto out = open_out(path);
    out << "user_id,n_purchases,mean_amount,std_amount,cv,home_tower_id\n";
    for (const auto& user : all_users) {
        const auto sit = by_user.find(user);
        const auto hit = home_towers.find(user);
        out << user << ',';
        if (sit != by_user.end()) {
            const auto& s = *sit->second;
            out << s.n_purchases << ',' << fmt_full(s.mean_amount) << ','
                << fmt_full(s.std_amount) << ',';
            if (s.cv) out << fmt_full(*s.cv);
        } else {
            out << "0,,,";
        }
        out << ',';
        if (hit != home_towers.end()) out << hit->second;
        out << '\n';
    }
    finish(out, path);
}

UserStatsFile read_user_stats_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    expect_header(in, "user_id,n_purchases,mean_amount,std_amount,cv,home_tower_id", path);
    UserStatsFile result;
    std::string line;
    std::vector<std::string_view> fields;
    while (std::getline(in, line)) {
        const auto row = csv::strip_cr(line);
        if (row.empty()) continue;
        csv::split(row, fields);
        if (fields.size() != 6 || fields[0].empty()) {
            throw std::runtime_error(path.string() + ": malformed row '" + std::string(row) + "'");
        }
        const auto n = csv::parse_int(fields[1]);
        if (!n || *n < 0) {
            throw std::runtime_error(path.string() + ": bad n_purchases in '" + std::string(row) + "'");
        }
        if (*n > 0) {
            UserPurchaseStats s;
            s.user_id = std::string(fields[0]);
            s.n_purchases = static_cast<std::uint64_t>(*n);
            const auto mean = csv::parse_double(fields[2]);
            const auto stddev = csv::parse_double(fields[3]);
            if (!mean || !stddev) {
                throw std::runtime_error(path.string() + ": bad stats in '" + std::string(row) + "'");
            }
            s.mean_amount = *mean;
            s.std_amount = *stddev;
            if (!fields[4].empty()) {
                const auto cv = csv::parse_double(fields[4]);
                if (!cv) {
                    throw std::runtime_error(path.string() + ": bad cv in '" + std::string(row) + "'");
                }
                s.cv = *cv;
            }
            result.stats.push_back(std::move(s));
        }
        if (!fields[5].empty()) {
            result.home_towers.emplace(std::string(fields[0]), std::string(fields[5]));
        }
    }
    return result;
}

void write_indicators_csv(const std::filesystem::path& path,
                          const std::vector<RegionIndicator>& indicators) {
    auto out = open_out(path);
    out << "tower_id,n_users,mean_of_means,cv_of_means,gini_of_means\n";
    for (const auto& ind : indicators) {
        out << ind.tower_id << ',' << ind.n_users << ',' << fmt6(ind.mean_of_means) << ','
            << fmt6(ind.cv_of_means) << ',' << fmt6(ind.gini_of_means) << '\n';
    }
    finish(out, path);
}

std::vector<RegionIndicator> read_indicators_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    expect_header(in, "tower_id,n_users,mean_of_means,cv_of_means,gini_of_means", path);
    std::vector<RegionIndicator> result;
    std::string line;
    std::vector<std::string_view> fields;
    while (std::getline(in, line)) {
        const auto row = csv::strip_cr(line);
        if (row.empty()) continue;
        csv::split(row, fields);
        if (fields.size() != 5 || fields[0].empty()) {
            throw std::runtime_error(path.string() + ": malformed row '" + std::string(row) + "'");
        }
        const auto n = csv::parse_int(fields[1]);
        const auto mean = csv::parse_double(fields[2]);
        const auto cv = csv::parse_double(fields[3]);
        const auto g = csv::parse_double(fields[4]);
        if (!n || *n < 1 || !mean || !cv || !g) {
            throw std::runtime_error(path.string() + ": malformed row '" + std::string(row) + "'");
        }
        result.push_back(RegionIndicator{std::string(fields[0]),
                                         static_cast<std::uint64_t>(*n), *mean, *cv, *g});
    }
    return result;
}

void write_graph_csv(const std::filesystem::path& path, const SocialGraph& graph) {
    auto out = open_out(path);
    out << "user_a,user_b,weight\n";
    for (const auto& e : graph.edges()) {
        out << graph.node_id(e.a) << ',' << graph.node_id(e.b) << ',' << e.weight << '\n';
    }
    finish(out, path);
}

SocialGraph read_graph_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    expect_header(in, "user_a,user_b,weight", path);
    struct RawEdge {
        std::string a;
        std::string b;
        std::int64_t weight;
    };
    std::vector<RawEdge> raw;
    std::set<std::string> ids;
    std::string line;
    std::vector<std::string_view> fields;
    while (std::getline(in, line)) {
        const auto row = csv::strip_cr(line);
        if (row.empty()) continue;
        csv::split(row, fields);
        if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
            throw std::runtime_error(path.string() + ": malformed row '" + std::string(row) + "'");
        }
        if (fields[0] >= fields[1]) {
            throw std::runtime_error(path.string() + ": edge not in user_a < user_b order: '" +
                                     std::string(row) + "'");
        }
        const auto w = csv::parse_int(fields[2]);
        if (!w || *w <= 0) {
            throw std::runtime_error(path.string() + ": bad weight in '" + std::string(row) + "'");
        }
        raw.push_back(RawEdge{std::string(fields[0]), std::string(fields[1]), *w});
        ids.insert(raw.back().a);
        ids.insert(raw.back().b);
    }
    std::vector<std::string> node_ids(ids.begin(), ids.end());
    std::map<std::string_view, std::int32_t> index;
    for (std::size_t i = 0; i < node_ids.size(); ++i) {
        index.emplace(node_ids[i], static_cast<std::int32_t>(i));
    }
    std::vector<Edge> edges;
    edges.reserve(raw.size());
    std::set<std::pair<std::int32_t, std::int32_t>> seen;
    for (const auto& r : raw) {
        Edge e;
        e.a = index.at(r.a);
        e.b = index.at(r.b);
        e.weight = r.weight;
        if (!seen.emplace(e.a, e.b).second) {
            throw std::runtime_error(path.string() + ": duplicate edge " + r.a + "," + r.b);
        }
        edges.push_back(e);
    }
    return SocialGraph(std::move(node_ids), std::move(edges));
}

void write_flagged_csv(const std::filesystem::path& path, const ServiceFlagReport& report) {
    auto out = open_out(path);
    out << "user_id,distinct_out,distinct_in,reason\n";
    for (const auto& f : report.flags) {
        out << f.user_id << ',' << f.distinct_out << ',' << f.distinct_in << ',' << f.reason
            << '\n';
    }
    finish(out, path);
}

void write_communities_csv(const std::filesystem::path& path, const SocialGraph& graph,
                           const Partition& partition) {
    if (partition.community_of.size() != graph.n_nodes()) {
        throw std::invalid_argument("write_communities_csv: partition does not cover the graph");
    }
    auto out = open_out(path);
    out << "user_id,community_id\n";
    for (std::size_t i = 0; i < graph.n_nodes(); ++i) {
        out << graph.node_id(static_cast<std::int32_t>(i)) << ',' << partition.community_of[i]
            << '\n';
    }
    finish(out, path);
}

std::map<std::string, std::int32_t> read_communities_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    expect_header(in, "user_id,community_id", path);
    std::map<std::string, std::int32_t> result;
    std::string line;
    std::vector<std::string_view> fields;
    while (std::getline(in, line)) {
        const auto row = csv::strip_cr(line);
        if (row.empty()) continue;
        csv::split(row, fields);
        if (fields.size() != 2 || fields[0].empty()) {
            throw std::runtime_error(path.string() + ": malformed row '" + std::string(row) + "'");
        }
        const auto c = csv::parse_int(fields[1]);
        if (!c || *c < 0) {
            throw std::runtime_error(path.string() + ": bad community id in '" + std::string(row) +
                                     "'");
        }
        if (!result.emplace(std::string(fields[0]), static_cast<std::int32_t>(*c)).second) {
            throw std::runtime_error(path.string() + ": duplicate user '" + std::string(fields[0]) +
                                     "'");
        }
    }
    return result;
}

void write_community_map_csv(const std::filesystem::path& path,
                             const std::vector<TowerDiversity>& diversity) {
    auto out = open_out(path);
    out << "tower_id,diversity_value,n_communities\n";
    for (const auto& d : diversity) {
        out << d.tower_id << ',' << fmt6(d.diversity_value) << ',' << d.n_communities << '\n';
    }
    finish(out, path);
}

std::vector<TowerDiversity> read_community_map_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    expect_header(in, "tower_id,diversity_value,n_communities", path);
    std::vector<TowerDiversity> result;
    std::string line;
    std::vector<std::string_view> fields;
    while (std::getline(in, line)) {
        const auto row = csv::strip_cr(line);
        if (row.empty()) continue;
        csv::split(row, fields);
        if (fields.size() != 3 || fields[0].empty()) {
            throw std::runtime_error(path.string() + ": malformed row '" + std::string(row) + "'");
        }
        const auto v = csv::parse_double(fields[1]);
        const auto n = csv::parse_int(fields[2]);
        if (!v || !n || *n < 1) {
            throw std::runtime_error(path.string() + ": malformed row '" + std::string(row) + "'");
        }
        result.push_back(TowerDiversity{std::string(fields[0]), *v,
                                        static_cast<std::uint64_t>(*n)});
    }
    return result;
}

void write_homophily_json(const std::filesystem::path& path, const HomophilyResult& result) {
    json j;
    j["observed_weighted_cv"] = result.observed_weighted_cv;
    j["baseline_weighted_cv"] = result.baseline_weighted_cv;
    j["baseline_std"] = result.baseline_std;
    j["n_shuffles"] = result.n_shuffles;
    j["seed"] = result.seed;
    write_json(path, j);
}

void export_geojson(const std::filesystem::path& path,
                    const std::vector<RegionIndicator>& indicators,
                    const std::vector<TowerDiversity>& diversity,
                    const std::vector<TowerInfo>& towers) {
    std::map<std::string, const TowerInfo*> registry;
    for (const auto& t : towers) registry.emplace(t.tower_id, &t);
    std::map<std::string, json> properties;
    for (const auto& ind : indicators) {
        if (!registry.count(ind.tower_id)) {
            throw std::runtime_error("export_geojson: tower '" + ind.tower_id +
                                     "' missing from registry");
        }
        auto& props = properties[ind.tower_id];
        props["mean_of_means"] = round6(ind.mean_of_means);
        props["cv_of_means"] = round6(ind.cv_of_means);
        props["gini_of_means"] = round6(ind.gini_of_means);
    }
    for (const auto& d : diversity) {
        if (!registry.count(d.tower_id)) {
            throw std::runtime_error("export_geojson: tower '" + d.tower_id +
                                     "' missing from registry");
        }
        properties[d.tower_id]["community_diversity"] = round6(d.diversity_value);
    }

    json features = json::array();
    for (const auto& [tower_id, props] : properties) {
        const auto* t = registry.at(tower_id);
        json feature;
        feature["type"] = "Feature";
        feature["id"] = tower_id;
        feature["geometry"] = {{"type", "Point"},
                               {"coordinates", {round6(t->lon), round6(t->lat)}}};
        feature["properties"] = props;
        features.push_back(std::move(feature));
    }
    json root;
    root["type"] = "FeatureCollection";
    root["features"] = std::move(features);
    write_json(path, root);
}

void export_summary(const std::filesystem::path& path, const SummaryData& data) {
    json j;
    j["cfa_fraction_cv_le_0_62"] = data.cfa_fraction_cv_le_0_62;
    j["cfa_fraction_cv_le_1_00"] = data.cfa_fraction_cv_le_1_00;
    j["pooled_cv"] = data.pooled_cv;
    j["graph_size"] = {{"nodes", data.graph_nodes}, {"edges", data.graph_edges}};
    j["avg_local_clustering"] = data.avg_local_clustering;
    j["avg_local_clustering_shuffled"] = data.avg_local_clustering_shuffled;
    j["n_communities"] = data.n_communities;
    j["observed_weighted_cv"] = data.observed_weighted_cv;
    j["baseline_weighted_cv"] = data.baseline_weighted_cv;
    write_json(path, j);
}

SummaryData read_summary_json(const std::filesystem::path& path) {
    const json j = load_json(path);
    SummaryData data;
    try {
        data.cfa_fraction_cv_le_0_62 = j.at("cfa_fraction_cv_le_0_62").get<double>();
        data.cfa_fraction_cv_le_1_00 = j.at("cfa_fraction_cv_le_1_00").get<double>();
        data.pooled_cv = j.at("pooled_cv").get<double>();
        data.graph_nodes = j.at("graph_size").at("nodes").get<std::uint64_t>();
        data.graph_edges = j.at("graph_size").at("edges").get<std::uint64_t>();
        data.avg_local_clustering = j.at("avg_local_clustering").get<double>();
        data.avg_local_clustering_shuffled = j.at("avg_local_clustering_shuffled").get<double>();
        data.n_communities = j.at("n_communities").get<std::uint64_t>();
        data.observed_weighted_cv = j.at("observed_weighted_cv").get<double>();
        data.baseline_weighted_cv = j.at("baseline_weighted_cv").get<double>();
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": missing or invalid field: " + e.what());
    }
    return data;
}

}  // namespace cdrkit
