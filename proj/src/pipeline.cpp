#include "cdrkit/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "cdrkit/communities.hpp"
#include "cdrkit/csv.hpp"
#include "cdrkit/exporter.hpp"
#include "cdrkit/homophily.hpp"
#include "cdrkit/ingest.hpp"
#include "cdrkit/purchases.hpp"
#include "cdrkit/timeutil.hpp"

namespace cdrkit {

namespace {

using nlohmann::json;

constexpr const char* kCdrCsv = "cdr.csv";
constexpr const char* kTopupCsv = "topup.csv";
constexpr const char* kTowersCsv = "towers.csv";
constexpr const char* kGroundTruthCsv = "ground_truth.csv";
constexpr const char* kRejectionsCdr = "rejections_cdr.csv";
constexpr const char* kRejectionsTopup = "rejections_topup.csv";
constexpr const char* kUserStatsCsv = "user_stats.csv";
constexpr const char* kStatsReport = "stats_report.json";
constexpr const char* kIndicatorsCsv = "indicators.csv";
constexpr const char* kGraphCsv = "graph.csv";
constexpr const char* kFlaggedCsv = "flagged.csv";
constexpr const char* kGraphMetrics = "graph_metrics.json";
constexpr const char* kCommunitiesCsv = "communities.csv";
constexpr const char* kHomophilyJson = "homophily.json";
constexpr const char* kCommunityMapCsv = "community_map.csv";
constexpr const char* kGeojson = "indicators.geojson";
constexpr const char* kSummaryJson = "summary.json";
constexpr const char* kManifest = "run_manifest.json";

constexpr const char* kArtifactNames[] = {
    kCdrCsv,       kTopupCsv,     kTowersCsv,       kGroundTruthCsv, kRejectionsCdr,
    kRejectionsTopup, kUserStatsCsv, kStatsReport,  kIndicatorsCsv,  kGraphCsv,
    kFlaggedCsv,   kGraphMetrics, kCommunitiesCsv,  kHomophilyJson,  kCommunityMapCsv,
    kGeojson,      kSummaryJson,
};

std::string trim(std::string_view s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return std::string(s.substr(begin, end - begin));
}

std::int64_t parse_int_or_die(const std::string& key, const std::string& value) {
    const auto v = csv::parse_int(value);
    if (!v) throw std::runtime_error("config: '" + key + "' wants an integer, got '" + value + "'");
    return *v;
}

std::uint64_t parse_u64_or_die(const std::string& key, const std::string& value) {
    const auto v = parse_int_or_die(key, value);
    if (v < 0) throw std::runtime_error("config: '" + key + "' must be non-negative");
    return static_cast<std::uint64_t>(v);
}

double parse_double_or_die(const std::string& key, const std::string& value) {
    const auto v = csv::parse_double(value);
    if (!v) throw std::runtime_error("config: '" + key + "' wants a number, got '" + value + "'");
    return *v;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= value.size()) {
        const auto comma = value.find(',', pos);
        const auto end = comma == std::string::npos ? value.size() : comma;
        parts.push_back(trim(std::string_view(value).substr(pos, end - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return parts;
}

void require_artifact(const std::filesystem::path& path, const char* producer) {
    if (!std::filesystem::exists(path)) {
        throw std::runtime_error("missing required artifact: " + path.string() + " (run '" +
                                 producer + "' first)");
    }
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open input file: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path.string() + ": invalid JSON: " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    out << j.dump(2) << '\n';
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// ---- stages ----------------------------------------------------------

void cmd_generate(const PipelineConfig& config) {
    if (!config.synth_configured()) {
        throw std::runtime_error(
            "generate: synthesis parameters missing (set n_users, blocks, income_levels, ...)");
    }
    SynthConfig synth = config.synth;
    synth.seed = config.seed;
    const auto data = generate(synth);
    for (const auto& w : data.warnings) std::cerr << "warning: " << w << '\n';
    std::filesystem::create_directories(config.out_dir);
    write_cdr_csv(config.out_dir / kCdrCsv, data.cdr);
    write_topup_csv(config.out_dir / kTopupCsv, data.topups);
    write_towers_csv(config.out_dir / kTowersCsv, data.towers);
    write_ground_truth_csv(config.out_dir / kGroundTruthCsv, data.truth);
    std::cout << "generated " << data.cdr.size() << " cdr rows, " << data.topups.size()
              << " top-ups, " << data.towers.size() << " towers, " << data.truth.users.size()
              << " users\n";
}

void cmd_validate(const PipelineConfig& config) {
    const auto window = config.window();
    const auto cdr = parse_cdr(config.cdr_file(), window);
    const auto topups = parse_topups(config.topup_file(), window);
    const auto towers = parse_towers(config.towers_file());
    std::filesystem::create_directories(config.out_dir);
    write_rejection_report(config.out_dir / kRejectionsCdr, cdr.report);
    write_rejection_report(config.out_dir / kRejectionsTopup, topups.report);
    std::cout << "cdr: " << cdr.report.retained << " retained, " << cdr.report.rejected
              << " rejected\n"
              << "topup: " << topups.report.retained << " retained, " << topups.report.rejected
              << " rejected\n"
              << "towers: " << towers.size() << '\n';
}

void cmd_stats(const PipelineConfig& config) {
    const auto window = config.window();
    const auto cdr = parse_cdr(config.cdr_file(), window);
    const auto topups = parse_topups(config.topup_file(), window);
    if (topups.records.size() < 2) {
        throw std::runtime_error("stats: fewer than 2 retained top-ups; nothing to analyze");
    }
    const auto stats = user_stats(topups.records);
    const auto home = home_tower_assignment(cdr.records);

    std::vector<double> cv_values;
    for (const auto& s : stats) {
        if (s.cv) cv_values.push_back(*s.cv);
    }
    if (cv_values.empty()) {
        throw std::runtime_error("stats: no user has two or more top-ups; the CFA is undefined");
    }
    const auto curve = cfa(cv_values);
    const double pooled = global_cv(topups.records);
    const auto indicators = region_indicators(stats, home, config.min_users);

    std::filesystem::create_directories(config.out_dir);
    write_user_stats_csv(config.out_dir / kUserStatsCsv, stats, home);
    write_indicators_csv(config.out_dir / kIndicatorsCsv, indicators);
    json report;
    report["n_users_with_cv"] = cv_values.size();
    report["cfa_fraction_cv_le_0_62"] = curve.fraction_at(0.62);
    report["cfa_fraction_cv_le_1_00"] = curve.fraction_at(1.00);
    report["pooled_cv"] = pooled;
    write_json_file(config.out_dir / kStatsReport, report);
    std::cout << "stats: " << stats.size() << " users, " << indicators.size()
              << " towers above min_users\n";
}

void cmd_graph(const PipelineConfig& config) {
    const auto window = config.window();
    const auto cdr = parse_cdr(config.cdr_file(), window);
    const auto report = flag_service_numbers(cdr.records, config.service);
    const auto kept = remove_flagged(cdr.records, report);
    if (kept.empty()) {
        throw std::runtime_error("graph: no records left after service-number filtering");
    }
    const auto graph = build_graph(kept, window, config.effective_min_months(window));
    if (graph.n_edges() < 2) {
        throw std::runtime_error(
            "graph: fewer than 2 persistent edges; no usable social graph in this input");
    }
    const double clustering = avg_local_clustering(graph);
    const auto shuffled = degree_preserving_shuffle(graph, config.shuffle_seed_effective(),
                                                    config.swap_factor);
    const double clustering_shuffled = avg_local_clustering(shuffled);

    std::filesystem::create_directories(config.out_dir);
    write_flagged_csv(config.out_dir / kFlaggedCsv, report);
    write_graph_csv(config.out_dir / kGraphCsv, graph);
    json metrics;
    metrics["n_nodes"] = graph.n_nodes();
    metrics["n_edges"] = graph.n_edges();
    metrics["total_weight"] = graph.total_weight();
    metrics["avg_local_clustering"] = clustering;
    metrics["avg_local_clustering_shuffled"] = clustering_shuffled;
    write_json_file(config.out_dir / kGraphMetrics, metrics);
    std::cout << "graph: " << graph.n_nodes() << " nodes, " << graph.n_edges() << " edges, "
              << report.flags.size() << " flagged service numbers\n";
}

void cmd_communities(const PipelineConfig& config) {
    require_artifact(config.out_dir / kGraphCsv, "graph");
    const auto graph = read_graph_csv(config.out_dir / kGraphCsv);
    if (graph.n_nodes() == 0) {
        throw std::runtime_error("communities: graph.csv holds no edges");
    }
    const auto partition = louvain(graph, config.resolution, config.louvain_seed_effective());
    write_communities_csv(config.out_dir / kCommunitiesCsv, graph, partition);
    std::cout << "communities: " << partition.n_communities() << " communities over "
              << graph.n_nodes() << " nodes\n";
}

void cmd_homophily(const PipelineConfig& config) {
    require_artifact(config.out_dir / kGraphCsv, "graph");
    require_artifact(config.out_dir / kCommunitiesCsv, "communities");
    require_artifact(config.out_dir / kUserStatsCsv, "stats");
    const auto graph = read_graph_csv(config.out_dir / kGraphCsv);
    const auto assignments = read_communities_csv(config.out_dir / kCommunitiesCsv);
    const auto user_file = read_user_stats_csv(config.out_dir / kUserStatsCsv);
    const auto towers = parse_towers(config.towers_file());

    std::vector<std::int32_t> labels(graph.n_nodes());
    for (std::size_t i = 0; i < graph.n_nodes(); ++i) {
        const auto it = assignments.find(graph.node_id(static_cast<std::int32_t>(i)));
        if (it == assignments.end()) {
            throw std::runtime_error("homophily: user '" +
                                     graph.node_id(static_cast<std::int32_t>(i)) +
                                     "' missing from communities.csv");
        }
        labels[i] = it->second;
    }
    const auto partition = Partition::from_labels(graph, labels);

    std::map<std::string, double> means;
    for (const auto& s : user_file.stats) means.emplace(s.user_id, s.mean_amount);

    std::uint64_t mean_bearing = 0;
    for (std::size_t i = 0; i < graph.n_nodes(); ++i) {
        if (means.count(graph.node_id(static_cast<std::int32_t>(i)))) ++mean_bearing;
    }
    if (mean_bearing < 2) {
        throw std::runtime_error(
            "homophily: fewer than 2 graph nodes carry purchase means; nothing to compare");
    }

    const auto stats = community_wealth_stats(partition, graph, means, user_file.home_towers,
                                              towers);
    const auto result = shuffled_baseline(partition, graph, means, config.shuffles,
                                          config.homophily_seed_effective());
    const auto diversity = map_community_diversity(stats, towers);

    write_homophily_json(config.out_dir / kHomophilyJson, result);
    write_community_map_csv(config.out_dir / kCommunityMapCsv, diversity);
    std::cout << "homophily: observed " << result.observed_weighted_cv << ", baseline "
              << result.baseline_weighted_cv << " over " << result.n_shuffles << " shuffles\n";
}

void cmd_export(const PipelineConfig& config) {
    require_artifact(config.out_dir / kIndicatorsCsv, "stats");
    require_artifact(config.out_dir / kStatsReport, "stats");
    require_artifact(config.out_dir / kGraphMetrics, "graph");
    require_artifact(config.out_dir / kCommunitiesCsv, "communities");
    require_artifact(config.out_dir / kHomophilyJson, "homophily");
    require_artifact(config.out_dir / kCommunityMapCsv, "homophily");

    const auto indicators = read_indicators_csv(config.out_dir / kIndicatorsCsv);
    const auto diversity = read_community_map_csv(config.out_dir / kCommunityMapCsv);
    const auto towers = parse_towers(config.towers_file());
    export_geojson(config.out_dir / kGeojson, indicators, diversity, towers);

    const auto stats_report = load_json_file(config.out_dir / kStatsReport);
    const auto metrics = load_json_file(config.out_dir / kGraphMetrics);
    const auto homophily = load_json_file(config.out_dir / kHomophilyJson);
    const auto assignments = read_communities_csv(config.out_dir / kCommunitiesCsv);
    std::int32_t max_comm = -1;
    for (const auto& [user, comm] : assignments) max_comm = std::max(max_comm, comm);

    SummaryData summary;
    try {
        summary.cfa_fraction_cv_le_0_62 = stats_report.at("cfa_fraction_cv_le_0_62").get<double>();
        summary.cfa_fraction_cv_le_1_00 = stats_report.at("cfa_fraction_cv_le_1_00").get<double>();
        summary.pooled_cv = stats_report.at("pooled_cv").get<double>();
        summary.graph_nodes = metrics.at("n_nodes").get<std::uint64_t>();
        summary.graph_edges = metrics.at("n_edges").get<std::uint64_t>();
        summary.avg_local_clustering = metrics.at("avg_local_clustering").get<double>();
        summary.avg_local_clustering_shuffled =
            metrics.at("avg_local_clustering_shuffled").get<double>();
        summary.observed_weighted_cv = homophily.at("observed_weighted_cv").get<double>();
        summary.baseline_weighted_cv = homophily.at("baseline_weighted_cv").get<double>();
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("export: malformed upstream report: ") + e.what());
    }
    summary.n_communities = static_cast<std::uint64_t>(max_comm + 1);
    export_summary(config.out_dir / kSummaryJson, summary);
    std::cout << "export: wrote " << (config.out_dir / kGeojson).string() << " and "
              << (config.out_dir / kSummaryJson).string() << '\n';
}

void write_manifest(const std::string& subcommand, const PipelineConfig& config) {
    json artifacts;
    for (const auto* name : kArtifactNames) {
        const auto path = config.out_dir / name;
        if (std::filesystem::exists(path)) artifacts[name] = hex64(fnv1a_file(path));
    }
    json manifest;
    manifest["subcommand"] = subcommand;
    manifest["config"] = config.echo();
    manifest["artifacts"] = std::move(artifacts);
    manifest["timestamp"] = format_utc(static_cast<UtcSeconds>(std::time(nullptr)));
    write_json_file(config.out_dir / kManifest, manifest);
}

}  // namespace

std::filesystem::path PipelineConfig::cdr_file() const {
    return cdr_path ? std::filesystem::path(*cdr_path) : out_dir / kCdrCsv;
}

std::filesystem::path PipelineConfig::topup_file() const {
    return topup_path ? std::filesystem::path(*topup_path) : out_dir / kTopupCsv;
}

std::filesystem::path PipelineConfig::towers_file() const {
    return towers_path ? std::filesystem::path(*towers_path) : out_dir / kTowersCsv;
}

ObservationWindow PipelineConfig::window() const {
    if (window_start || window_months) {
        if (!window_start || !window_months) {
            throw std::runtime_error(
                "config: window_start and window_months must be set together");
        }
        const auto start = parse_utc(*window_start);
        if (!start) {
            throw std::runtime_error("config: window_start is not a valid UTC timestamp: '" +
                                     *window_start + "'");
        }
        if (*window_months < 1) {
            throw std::runtime_error("config: window_months must be positive");
        }
        return ObservationWindow::from_months(*start, *window_months);
    }
    if (synth_configured()) {
        return ObservationWindow::from_months(month_start(synth.start_month_index),
                                              synth.n_months);
    }
    throw std::runtime_error(
        "config: no observation window; set window_start + window_months or synthesis "
        "parameters");
}

int PipelineConfig::effective_min_months(const ObservationWindow& w) const {
    const int effective = min_months == 0 ? w.month_count() : min_months;
    if (effective < 1 || effective > w.month_count()) {
        throw std::runtime_error("config: min_months must be in [1, " +
                                 std::to_string(w.month_count()) + "]");
    }
    return effective;
}

std::map<std::string, std::string> PipelineConfig::echo() const {
    std::map<std::string, std::string> kv;
    kv["out"] = out_dir.string();
    kv["seed"] = std::to_string(seed);
    kv["louvain_seed"] = std::to_string(louvain_seed_effective());
    kv["shuffle_seed"] = std::to_string(shuffle_seed_effective());
    kv["homophily_seed"] = std::to_string(homophily_seed_effective());
    kv["resolution"] = fmt_full(resolution);
    kv["min_months"] = std::to_string(min_months);
    kv["min_users"] = std::to_string(min_users);
    kv["max_contacts"] = std::to_string(service.max_contacts);
    kv["asymmetry"] = fmt_full(service.asymmetry_cutoff);
    kv["activity_floor"] = std::to_string(service.activity_floor);
    kv["shuffles"] = std::to_string(shuffles);
    kv["swap_factor"] = fmt_full(swap_factor);
    kv["cdr"] = cdr_file().string();
    kv["topup"] = topup_file().string();
    kv["towers"] = towers_file().string();
    if (window_start) kv["window_start"] = *window_start;
    if (window_months) kv["window_months"] = std::to_string(*window_months);
    if (synth_configured()) {
        kv["n_users"] = std::to_string(synth.n_users);
        kv["n_towers"] = std::to_string(synth.n_towers);
        kv["n_months"] = std::to_string(synth.n_months);
        std::string blocks, levels;
        for (std::size_t i = 0; i < synth.planted_blocks.size(); ++i) {
            if (i) blocks += ',';
            blocks += std::to_string(synth.planted_blocks[i]);
        }
        for (std::size_t i = 0; i < synth.income_levels.size(); ++i) {
            if (i) levels += ',';
            levels += fmt_full(synth.income_levels[i]);
        }
        kv["blocks"] = blocks;
        kv["income_levels"] = levels;
        kv["p_in"] = fmt_full(synth.p_in);
        kv["p_out"] = fmt_full(synth.p_out);
        kv["homophily_strength"] = fmt_full(synth.homophily_strength);
        kv["purchase_cv"] = fmt_full(synth.purchase_cv);
        kv["n_service_numbers"] = std::to_string(synth.n_service_numbers);
        kv["service_fanout"] = std::to_string(synth.service_fanout);
        kv["start_month_index"] = std::to_string(synth.start_month_index);
    }
    return kv;
}

PipelineConfig load_config(const std::optional<std::filesystem::path>& config_file,
                           const FlagOverrides& flags) {
    PipelineConfig config;
    if (config_file) {
        std::ifstream in(*config_file, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open config file: " + config_file->string());
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto stripped = trim(csv::strip_cr(line));
            if (stripped.empty() || stripped[0] == '#') continue;
            const auto eq = stripped.find('=');
            if (eq == std::string::npos) {
                throw std::runtime_error("config: line " + std::to_string(line_no) +
                                         " is not key = value");
            }
            const auto key = trim(std::string_view(stripped).substr(0, eq));
            const auto value = trim(std::string_view(stripped).substr(eq + 1));
            if (key.empty() || value.empty()) {
                throw std::runtime_error("config: line " + std::to_string(line_no) +
                                         " has an empty key or value");
            }
            if (key == "out") {
                config.out_dir = value;
            } else if (key == "seed") {
                config.seed = parse_u64_or_die(key, value);
            } else if (key == "louvain_seed") {
                config.louvain_seed = parse_u64_or_die(key, value);
            } else if (key == "shuffle_seed") {
                config.shuffle_seed = parse_u64_or_die(key, value);
            } else if (key == "homophily_seed") {
                config.homophily_seed = parse_u64_or_die(key, value);
            } else if (key == "resolution") {
                config.resolution = parse_double_or_die(key, value);
            } else if (key == "min_months") {
                config.min_months = static_cast<int>(parse_int_or_die(key, value));
            } else if (key == "min_users") {
                config.min_users = parse_u64_or_die(key, value);
            } else if (key == "max_contacts") {
                config.service.max_contacts = parse_u64_or_die(key, value);
            } else if (key == "asymmetry") {
                config.service.asymmetry_cutoff = parse_double_or_die(key, value);
            } else if (key == "activity_floor") {
                config.service.activity_floor = parse_u64_or_die(key, value);
            } else if (key == "shuffles") {
                config.shuffles = parse_u64_or_die(key, value);
            } else if (key == "swap_factor") {
                config.swap_factor = parse_double_or_die(key, value);
            } else if (key == "cdr") {
                config.cdr_path = value;
            } else if (key == "topup") {
                config.topup_path = value;
            } else if (key == "towers") {
                config.towers_path = value;
            } else if (key == "window_start") {
                config.window_start = value;
            } else if (key == "window_months") {
                config.window_months = static_cast<int>(parse_int_or_die(key, value));
            } else if (key == "n_users") {
                config.synth.n_users = parse_u64_or_die(key, value);
            } else if (key == "n_towers") {
                config.synth.n_towers = parse_u64_or_die(key, value);
            } else if (key == "n_months") {
                config.synth.n_months = static_cast<int>(parse_int_or_die(key, value));
            } else if (key == "blocks") {
                config.synth.planted_blocks.clear();
                for (const auto& part : split_list(value)) {
                    config.synth.planted_blocks.push_back(parse_u64_or_die(key, part));
                }
            } else if (key == "income_levels") {
                config.synth.income_levels.clear();
                for (const auto& part : split_list(value)) {
                    config.synth.income_levels.push_back(parse_double_or_die(key, part));
                }
            } else if (key == "p_in") {
                config.synth.p_in = parse_double_or_die(key, value);
            } else if (key == "p_out") {
                config.synth.p_out = parse_double_or_die(key, value);
            } else if (key == "homophily_strength") {
                config.synth.homophily_strength = parse_double_or_die(key, value);
            } else if (key == "purchase_cv") {
                config.synth.purchase_cv = parse_double_or_die(key, value);
            } else if (key == "n_service_numbers") {
                config.synth.n_service_numbers = parse_u64_or_die(key, value);
            } else if (key == "service_fanout") {
                config.synth.service_fanout = parse_u64_or_die(key, value);
            } else if (key == "start_month_index") {
                config.synth.start_month_index = static_cast<int>(parse_int_or_die(key, value));
            } else {
                throw std::runtime_error("config: unknown key '" + key + "'");
            }
        }
    }

    if (flags.out) config.out_dir = *flags.out;
    if (flags.seed) config.seed = *flags.seed;
    if (flags.resolution) config.resolution = *flags.resolution;
    if (flags.min_months) config.min_months = *flags.min_months;
    if (flags.min_users) config.min_users = *flags.min_users;
    if (flags.max_contacts) config.service.max_contacts = *flags.max_contacts;
    if (flags.asymmetry) config.service.asymmetry_cutoff = *flags.asymmetry;
    if (flags.shuffles) config.shuffles = *flags.shuffles;

    if (!(config.resolution > 0.0)) throw std::runtime_error("config: resolution must be > 0");
    if (config.min_months < 0) throw std::runtime_error("config: min_months must be >= 0");
    if (config.min_users < 1) throw std::runtime_error("config: min_users must be >= 1");
    if (config.shuffles < 1) throw std::runtime_error("config: shuffles must be >= 1");
    if (!(config.swap_factor > 0.0)) throw std::runtime_error("config: swap_factor must be > 0");
    if (config.window_start.has_value() != config.window_months.has_value()) {
        throw std::runtime_error("config: window_start and window_months must be set together");
    }
    if (!(config.service.asymmetry_cutoff > 0.0) || config.service.asymmetry_cutoff > 1.0) {
        throw std::runtime_error("config: asymmetry must be in (0, 1]");
    }
    if (config.service.max_contacts < 1) {
        throw std::runtime_error("config: max_contacts must be >= 1");
    }
    {
        std::set<std::string> paths{config.cdr_file().string(), config.topup_file().string(),
                                    config.towers_file().string()};
        if (paths.size() != 3) {
            throw std::runtime_error("config: cdr, topup and towers paths must be distinct");
        }
    }
    if (config.synth_configured()) {
        config.synth.seed = config.seed;
        config.synth.validate();
    }
    return config;
}

void run_subcommand(const std::string& name, const PipelineConfig& config) {
    const auto run_stage = [&](const std::string& stage) {
        if (stage == "generate") {
            cmd_generate(config);
        } else if (stage == "validate") {
            cmd_validate(config);
        } else if (stage == "stats") {
            cmd_stats(config);
        } else if (stage == "graph") {
            cmd_graph(config);
        } else if (stage == "communities") {
            cmd_communities(config);
        } else if (stage == "homophily") {
            cmd_homophily(config);
        } else if (stage == "export") {
            cmd_export(config);
        } else {
            throw std::runtime_error("unknown subcommand '" + stage + "'");
        }
    };
    if (name == "all") {
        if (config.synth_configured()) run_stage("generate");
        run_stage("validate");
        run_stage("stats");
        run_stage("graph");
        run_stage("communities");
        run_stage("homophily");
        run_stage("export");
    } else {
        run_stage(name);
    }
    std::filesystem::create_directories(config.out_dir);
    write_manifest(name, config);
}

}  // namespace cdrkit
