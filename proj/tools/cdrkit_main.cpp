#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cdrkit/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"CDR and airtime top-up analytics pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    double resolution = 0.0;
    int min_months = 0;
    std::uint64_t min_users = 0;
    std::uint64_t max_contacts = 0;
    double asymmetry = 0.0;
    std::uint64_t shuffles = 0;

    auto* opt_config = app.add_option("--config", config_path, "key = value config file");
    auto* opt_out = app.add_option("--out", out_dir, "output directory");
    auto* opt_seed = app.add_option("--seed", seed, "master RNG seed");
    auto* opt_resolution =
        app.add_option("--resolution", resolution, "modularity resolution (gamma)");
    auto* opt_min_months =
        app.add_option("--min-months", min_months, "months a pair must cover (0 = all)");
    auto* opt_min_users =
        app.add_option("--min-users", min_users, "minimum users per tower for indicators");
    auto* opt_max_contacts =
        app.add_option("--max-contacts", max_contacts, "service filter: distinct contact cap");
    auto* opt_asymmetry =
        app.add_option("--asymmetry", asymmetry, "service filter: in/out asymmetry cutoff");
    auto* opt_shuffles =
        app.add_option("--shuffles", shuffles, "homophily baseline shuffle rounds");

    static const char* kSubcommands[] = {"generate", "validate",  "stats",  "graph",
                                         "communities", "homophily", "export", "all"};
    for (const auto* name : kSubcommands) {
        auto* sub = app.add_subcommand(name);
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        cdrkit::FlagOverrides flags;
        if (opt_out->count()) flags.out = out_dir;
        if (opt_seed->count()) flags.seed = seed;
        if (opt_resolution->count()) flags.resolution = resolution;
        if (opt_min_months->count()) flags.min_months = min_months;
        if (opt_min_users->count()) flags.min_users = min_users;
        if (opt_max_contacts->count()) flags.max_contacts = max_contacts;
        if (opt_asymmetry->count()) flags.asymmetry = asymmetry;
        if (opt_shuffles->count()) flags.shuffles = shuffles;
        std::optional<std::filesystem::path> config_file;
        if (opt_config->count()) config_file = config_path;

        const auto config = cdrkit::load_config(config_file, flags);
        const auto subcommand = app.get_subcommands().front()->get_name();
        cdrkit::run_subcommand(subcommand, config);
        return 0;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
}
