#include "mfnet/config.hpp"

#include "mfnet/error.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>

namespace mfnet {

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T> T parse_number(std::string_view key, std::string_view value)
{
    T out{};
    const auto *end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end)
        throw Error("option " + std::string(key) + ": bad number '" + std::string(value) + "'");
    return out;
}

[[noreturn]] void bad_choice(std::string_view key, std::string_view value)
{
    throw Error("option " + std::string(key) + ": unknown value '" + std::string(value) + "'");
}

std::set<std::string> parse_list(std::string_view value)
{
    std::set<std::string> out;
    while (!value.empty()) {
        const auto comma = value.find(',');
        const auto item = trim(value.substr(0, comma));
        if (!item.empty())
            out.emplace(item);
        if (comma == std::string_view::npos)
            break;
        value.remove_prefix(comma + 1);
    }
    return out;
}

using Setter = std::function<void(Config &, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>> &setters()
{
    static const std::map<std::string, Setter, std::less<>> table{
        {"publications", [](Config &c, auto, auto v) { c.publications = std::string(v); }},
        {"authors", [](Config &c, auto, auto v) { c.authors = std::string(v); }},
        {"affiliations", [](Config &c, auto, auto v) { c.affiliations = std::string(v); }},
        {"window_start", [](Config &c, auto k, auto v) { c.window.first = parse_number<int>(k, v); }},
        {"window_end", [](Config &c, auto k, auto v) { c.window.last = parse_number<int>(k, v); }},
        {"training_years", [](Config &c, auto, auto v) { c.training = parse_year_range(v); }},
        {"horizon", [](Config &c, auto k, auto v) { c.horizon = parse_number<int>(k, v); }},
        {"seed",
         [](Config &c, auto k, auto v) {
             c.seed = parse_number<std::uint64_t>(k, v);
             c.hmm.seed = c.seed;
         }},
        {"dispersion",
         [](Config &c, auto k, auto v) {
             if (v == "variance")
                 c.abstraction.metric = DispersionMetric::variance;
             else if (v == "mad")
                 c.abstraction.metric = DispersionMetric::mean_absolute_deviation;
             else
                 bad_choice(k, v);
         }},
        {"protected_countries", [](Config &c, auto, auto v) { c.abstraction.protected_countries = parse_list(v); }},
        {"protected_mode",
         [](Config &c, auto k, auto v) {
             if (v == "isolate")
                 c.abstraction.protected_mode = ProtectedMode::isolate;
             else if (v == "exempt")
                 c.abstraction.protected_mode = ProtectedMode::exempt;
             else
                 bad_choice(k, v);
         }},
        {"smoothing",
         [](Config &c, auto k, auto v) {
             if (v == "hmm")
                 c.hmm.method = SmoothingMethod::hmm;
             else if (v == "mean")
                 c.hmm.method = SmoothingMethod::mean;
             else
                 bad_choice(k, v);
         }},
        {"hmm_states", [](Config &c, auto k, auto v) { c.hmm.hidden_states = parse_number<int>(k, v); }},
        {"hmm_max_iterations", [](Config &c, auto k, auto v) { c.hmm.max_iterations = parse_number<int>(k, v); }},
        {"hmm_tolerance", [](Config &c, auto k, auto v) { c.hmm.tolerance = parse_number<double>(k, v); }},
        {"smoothing_epsilon", [](Config &c, auto k, auto v) { c.hmm.epsilon = parse_number<double>(k, v); }},
        {"weekly_rule",
         [](Config &c, auto k, auto v) {
             if (v == "geometric")
                 c.weekly_rule = WeeklyRule::geometric;
             else if (v == "linear")
                 c.weekly_rule = WeeklyRule::linear;
             else
                 bad_choice(k, v);
         }},
        {"weeks_per_year", [](Config &c, auto k, auto v) { c.weeks_per_year = parse_number<int>(k, v); }},
        {"snapshot",
         [](Config &c, auto k, auto v) {
             if (v == "weekly")
                 c.cadence = SnapshotCadence::weekly;
             else if (v == "yearly")
                 c.cadence = SnapshotCadence::yearly;
             else
                 bad_choice(k, v);
         }},
        {"dense_threshold", [](Config &c, auto k, auto v) { c.dense_threshold = parse_number<std::size_t>(k, v); }},
        {"oracle_agents", [](Config &c, auto k, auto v) { c.oracle_agents = parse_number<std::size_t>(k, v); }},
        {"oracle_seeds", [](Config &c, auto k, auto v) { c.oracle_seeds = parse_number<int>(k, v); }},
        {"subset",
         [](Config &c, auto k, auto v) {
             if (v == "dutch")
                 c.dutch_only = true;
             else if (v == "all")
                 c.dutch_only = false;
             else
                 bad_choice(k, v);
         }},
        {"synth_authors", [](Config &c, auto k, auto v) { c.synth.authors = parse_number<int>(k, v); }},
        {"synth_first_active_year",
         [](Config &c, auto k, auto v) { c.synth.first_active_year = parse_number<int>(k, v); }},
        {"synth_unaffiliated_share",
         [](Config &c, auto k, auto v) { c.synth.unaffiliated_share = parse_number<double>(k, v); }},
        {"synth_article_share", [](Config &c, auto k, auto v) { c.synth.article_share = parse_number<double>(k, v); }},
    };
    return table;
}

std::filesystem::path or_default(const std::filesystem::path &p, const std::filesystem::path &output,
                                 const char *name)
{
    return p.empty() ? output / name : p;
}

} // namespace

YearRange parse_year_range(std::string_view text)
{
    text = trim(text);
    const auto dash = text.find('-');
    auto year = [&](std::string_view s) {
        s = trim(s);
        int y = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), y);
        if (ec != std::errc{} || ptr != s.data() + s.size())
            throw Error("bad year range '" + std::string(text) + "'");
        return y;
    };
    YearRange r;
    if (dash == std::string_view::npos) {
        r.first = r.last = year(text);
    } else {
        r.first = year(text.substr(0, dash));
        r.last = year(text.substr(dash + 1));
    }
    if (r.first > r.last)
        throw Error("empty year range '" + std::string(text) + "'");
    return r;
}

std::filesystem::path Config::publications_path(const std::filesystem::path &output) const
{
    return or_default(publications, output, "publications.csv");
}

std::filesystem::path Config::authors_path(const std::filesystem::path &output) const
{
    return or_default(authors, output, "authors.csv");
}

std::filesystem::path Config::affiliations_path(const std::filesystem::path &output) const
{
    return or_default(affiliations, output, "affiliations.csv");
}

void Config::validate() const
{
    if (window.first > window.last)
        throw Error("empty data window");
    if (training.first < window.first || training.last > window.last)
        throw Error("training years outside the data window");
    if (horizon < 1)
        throw Error("horizon must be at least one year");
    if (weeks_per_year < 1)
        throw Error("weeks_per_year must be positive");
    if (hmm.hidden_states < 1 || hmm.max_iterations < 1 || !(hmm.tolerance > 0.0) || !(hmm.epsilon >= 0.0))
        throw Error("bad HMM settings");
    if (oracle_agents < 2 || oracle_seeds < 1)
        throw Error("oracle needs at least two agents and one seed");
    if (synth.authors < 2 || !(synth.unaffiliated_share >= 0.0 && synth.unaffiliated_share < 1.0) ||
        !(synth.article_share >= 0.0 && synth.article_share < 1.0))
        throw Error("bad synth settings");
}

void set_option(Config &config, std::string_view key, std::string_view value)
{
    const auto &table = setters();
    const auto it = table.find(key);
    if (it == table.end())
        throw Error("unknown option '" + std::string(key) + "'");
    it->second(config, key, trim(value));
}

Config read_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open config " + path.string());
    Config config;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view text = raw;
        if (const auto hash = text.find('#'); hash != std::string_view::npos)
            text = text.substr(0, hash);
        text = trim(text);
        if (text.empty())
            continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(path.string(), line, "expected key = value");
        try {
            set_option(config, trim(text.substr(0, eq)), text.substr(eq + 1));
        } catch (const ParseError &) {
            throw;
        } catch (const Error &e) {
            throw ParseError(path.string(), line, e.what());
        }
    }
    return config;
}

} // namespace mfnet
