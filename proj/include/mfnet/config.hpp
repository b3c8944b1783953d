#pragma once

#include "mfnet/abstraction.hpp"
#include "mfnet/corpus.hpp"
#include "mfnet/estimation.hpp"
#include "mfnet/meanfield.hpp"

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>

namespace mfnet {

struct YearRange {
    int first = 2006;
    int last = 2008;
};

// "2006-2008" or "2008". Throws Error.
YearRange parse_year_range(std::string_view text);

struct SynthOptions {
    int authors = 400;
    int first_active_year = 2004; // yearly papers are generated from here to the window end
    double unaffiliated_share = 0.05;
    double article_share = 0.15;
};

// Every pipeline option. Keys of the config file match the field names below
// (see README for the full schema).
struct Config {
    // corpus files; empty means <output>/publications.csv etc.
    std::filesystem::path publications;
    std::filesystem::path authors;
    std::filesystem::path affiliations;
    YearWindow window;

    YearRange training;
    int horizon = 2; // simulated years after the last training year
    std::uint64_t seed = 1;

    AbstractionOptions abstraction;
    HmmConfig hmm;

    WeeklyRule weekly_rule = WeeklyRule::geometric;
    int weeks_per_year = 52;
    SnapshotCadence cadence = SnapshotCadence::weekly;
    std::size_t dense_threshold = 512;

    std::size_t oracle_agents = 2000;
    int oracle_seeds = 3;

    bool dutch_only = true; // subset for age and triad reports

    SynthOptions synth;

    std::filesystem::path publications_path(const std::filesystem::path &output) const;
    std::filesystem::path authors_path(const std::filesystem::path &output) const;
    std::filesystem::path affiliations_path(const std::filesystem::path &output) const;

    // Throws Error on inconsistent values.
    void validate() const;
};

// Sets one option. Throws Error on an unknown key or a bad value.
void set_option(Config &config, std::string_view key, std::string_view value);

// key = value lines; '#' starts a comment. Throws ParseError with the line.
Config read_config(const std::filesystem::path &path);

} // namespace mfnet
