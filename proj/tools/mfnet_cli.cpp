#include "mfnet/config.hpp"
#include "mfnet/error.hpp"
#include "mfnet/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

int main(int argc, char **argv)
{
    CLI::App app{"Mean-field model of a scientific collaboration network"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string years;
    std::string subset;
    std::string output = ".";
    app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "RNG seed (overrides the config)");
    app.add_option("--years", years, "training years, e.g. 2006-2008");
    app.add_option("--subset", subset, "classes for age and triad reports")->check(CLI::IsMember({"dutch", "all"}));
    app.add_option("--output", output, "directory for every stage's files");

    const char *stages[][2] = {
        {"synth", "write a seeded synthetic corpus"},
        {"ingest", "load and validate the corpus, summarize per year"},
        {"abstract", "merge institutions into classes"},
        {"estimate", "yearly contact and kappa tables, smoothed model"},
        {"simulate", "mean-field trajectory"},
        {"baseline", "mean-field trajectory under uniform contact"},
        {"oracle", "agent-based runs and their distance to the mean-field"},
        {"analyze", "class, age, triad and baseline reports"},
    };
    for (const auto &s : stages)
        app.add_subcommand(s[0], s[1])->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        mfnet::Config config;
        if (!config_path.empty())
            config = mfnet::read_config(config_path);
        if (seed)
            mfnet::set_option(config, "seed", std::to_string(*seed));
        if (!years.empty())
            mfnet::set_option(config, "training_years", years);
        if (!subset.empty())
            mfnet::set_option(config, "subset", subset);
        mfnet::run_stage(app.get_subcommands().front()->get_name(), config, output, std::cout);
    } catch (const std::exception &e) {
        std::cerr << "mfnet: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
