#include "mfnet/pipeline.hpp"

#include "mfnet/analysis.hpp"
#include "mfnet/csv.hpp"
#include "mfnet/error.hpp"
#include "mfnet/oracle.hpp"
#include "mfnet/serialization.hpp"
#include "mfnet/synth.hpp"

#include <cmath>
#include <string>

namespace mfnet {

namespace fs = std::filesystem;

namespace {

EventLog load(const Config &config, const fs::path &output)
{
    for (const auto &p :
         {config.publications_path(output), config.authors_path(output), config.affiliations_path(output)})
        if (!fs::exists(p))
            throw Error("missing input file " + p.string());
    return load_corpus(config.publications_path(output), config.authors_path(output),
                       config.affiliations_path(output), LoadOptions{config.window});
}

fs::path require(const fs::path &output, const char *name)
{
    auto p = output / name;
    if (!fs::exists(p))
        throw Error("missing input file " + p.string() + " (run the earlier stage first)");
    return p;
}

SmoothedModel load_model(const fs::path &output, const ClassMap &classes)
{
    auto model = model_from_json(read_json(require(output, files::model)));
    if (model.contact.class_count != classes.size())
        throw MismatchError("model covers " + std::to_string(model.contact.class_count) +
                            " classes, class map " + std::to_string(classes.size()));
    return model;
}

TrajectoryOptions trajectory_options(const Config &config, SnapshotCadence cadence)
{
    TrajectoryOptions t;
    t.years = config.horizon;
    t.weeks_per_year = config.weeks_per_year;
    t.cadence = cadence;
    t.operator_options.dense_threshold = config.dense_threshold;
    return t;
}

ModelOptions model_options(const Config &config) { return {config.weekly_rule, config.weeks_per_year}; }

// Observed state of the last training year; the trajectory resets it to the
// start of the first simulated year.
OccupancyVector initial_occupancy(const Config &config, const fs::path &output, const ClassMap &classes,
                                  const StateSpace &space)
{
    const auto log = load(config, output);
    return {0, observed_occupancy(log, classes, space, config.training.last)};
}

void check_against_classes(const StateSpace &space, const ClassMap &classes,
                           const std::vector<OccupancyVector> &snapshots, const fs::path &source)
{
    if (snapshots.empty())
        throw MismatchError(source.string() + " holds no snapshots");
    const double n = classes.total_population();
    for (const auto &snap : snapshots) {
        const auto mass = class_masses(space, snap.fractions);
        for (ClassId u = 0; u < classes.size(); ++u) {
            const double expected = classes.population(u) / n;
            if (std::abs(mass[u] - expected) > 1e-6)
                throw MismatchError(source.string() + ": week " + std::to_string(snap.week) + " gives class " +
                                    std::to_string(u) + " mass " + csv::format_double(mass[u]) +
                                    " but the class map implies " + csv::format_double(expected));
        }
    }
}

} // namespace

void run_synth(const Config &config, const fs::path &output, std::ostream &log)
{
    const auto corpus = synthesize_corpus(config.synth, config.window, config.seed);
    write_publications(config.publications_path(output), corpus.publications);
    write_authors(config.authors_path(output), corpus.authors);
    write_affiliations(config.affiliations_path(output), corpus.affiliations);
    log << "synth: " << corpus.publications.size() << " papers, " << corpus.authors.size() << " authors, "
        << corpus.affiliations.size() << " institutions\n";
}

void run_ingest(const Config &config, const fs::path &output, std::ostream &log)
{
    const auto events = load(config, output);
    std::map<int, std::pair<int, int>> papers; // year -> (proceedings, other)
    for (const auto &p : events.all_publications())
        (p.venue_kind == VenueKind::proceedings ? papers[p.year].first : papers[p.year].second) += 1;
    std::map<int, int> debuts;
    for (const auto &[id, author] : events.authors())
        if (auto y = events.first_year(id))
            ++debuts[*y];

    auto out = csv::open_output(output / files::ingest_summary);
    out << "year,proceedings,other,new_authors\n";
    for (int y = config.window.first; y <= config.window.last; ++y)
        out << y << ',' << papers[y].first << ',' << papers[y].second << ',' << debuts[y] << '\n';
    log << "ingest: " << events.publications().size() << " proceedings papers, " << events.authors().size()
        << " authors -> " << (output / files::ingest_summary).string() << '\n';
}

void run_abstract(const Config &config, const fs::path &output, std::ostream &log)
{
    const auto events = load(config, output);
    const auto dist = scientist_distribution(events);
    int unknown = 0;
    for (const auto &[id, author] : events.authors())
        if (author.affiliation_id == kUnknownInstitution && events.first_year(id))
            ++unknown;
    const auto classes = with_unknown_class(abstract_classes(dist, events.affiliations(), config.abstraction), unknown);
    write_class_map(output / files::class_map, classes);
    log << "abstract: " << dist.counts.size() << " institutions -> " << classes.size() << " classes\n";
}

void run_estimate(const Config &config, const fs::path &output, std::ostream &log)
{
    const auto events = load(config, output);
    const auto classes = read_class_map(require(output, files::class_map));
    std::vector<YearTables> yearly;
    for (int y = config.training.first; y <= config.training.last; ++y) {
        YearTables t{compute_contact(events, classes, y), compute_kappa(events, classes, y)};
        write_json(output / ("contact_" + std::to_string(y) + ".json"), to_json(t.contact));
        write_json(output / ("kappa_" + std::to_string(y) + ".json"), to_json(t.kappa));
        yearly.push_back(std::move(t));
    }
    auto hmm = config.hmm;
    hmm.seed = config.seed;
    const auto model = estimate_smoothed(yearly, hmm);
    write_json(output / files::model, to_json(model));
    log << "estimate: " << yearly.size() << " training years, " << model.kappa.entries.size() << " kappa keys"
        << (model.fallback_used ? " (mean fallback)" : "") << '\n';
}

void run_simulate(const Config &config, const fs::path &output, std::ostream &log)
{
    const auto classes = read_class_map(require(output, files::class_map));
    const auto model = load_model(output, classes);
    const auto compiled = compile_model(model, classes, model_options(config));
    const auto initial = initial_occupancy(config, output, classes, compiled.space);
    const auto snaps = run_trajectory(initial, compiled, trajectory_options(config, config.cadence));
    write_trajectory(output / files::trajectory, compiled.space, snaps);
    log << "simulate: " << snaps.size() << " snapshots -> " << (output / files::trajectory).string() << '\n';
}

void run_baseline(const Config &config, const fs::path &output, std::ostream &log)
{
    const auto classes = read_class_map(require(output, files::class_map));
    auto model = load_model(output, classes);
    model.contact = rescale_like(uniform_baseline(classes), model.contact, classes);
    const auto compiled = compile_model(model, classes, model_options(config));
    const auto initial = initial_occupancy(config, output, classes, compiled.space);
    const auto snaps = run_trajectory(initial, compiled, trajectory_options(config, config.cadence));
    write_trajectory(output / files::trajectory_uniform, compiled.space, snaps);
    log << "baseline: " << snaps.size() << " snapshots -> " << (output / files::trajectory_uniform).string()
        << '\n';
}

void run_oracle(const Config &config, const fs::path &output, std::ostream &log)
{
    const auto classes = read_class_map(require(output, files::class_map));
    const auto model = load_model(output, classes);
    const auto compiled = compile_model(model, classes, model_options(config));
    const auto initial = initial_occupancy(config, output, classes, compiled.space);
    const auto meanfield = run_trajectory(initial, compiled, trajectory_options(config, SnapshotCadence::weekly));

    std::vector<OracleRun> runs;
    for (int k = 0; k < config.oracle_seeds; ++k) {
        const auto pop = make_population(compiled.space, initial.fractions, config.oracle_agents, config.seed + k);
        runs.push_back(simulate_agents(pop, compiled, config.horizon, config.weeks_per_year));
    }
    write_oracle_runs(output / files::oracle_trajectory, compiled.space, runs);

    const auto averaged = average_runs(runs);
    const auto cmp = compare_to_meanfield(averaged, meanfield);
    auto out = csv::open_output(output / files::oracle_compare);
    out << "week,l1\n";
    for (std::size_t t = 0; t < cmp.l1.size(); ++t)
        out << meanfield[t].week << ',' << csv::format_double(cmp.l1[t]) << '\n';
    log << "oracle: " << runs.size() << " seeds x " << config.oracle_agents
        << " agents, max weekly L1 = " << csv::format_double(cmp.max_l1) << '\n';
}

void run_analyze(const Config &config, const fs::path &output, std::ostream &log)
{
    const auto classes = read_class_map(require(output, files::class_map));
    const StateSpace space(classes.size());
    const auto traj_path = require(output, files::trajectory);
    const auto uniform_path = require(output, files::trajectory_uniform);
    const auto estimated = read_trajectory(traj_path, space);
    const auto uniform = read_trajectory(uniform_path, space);
    check_against_classes(space, classes, estimated, traj_path);
    check_against_classes(space, classes, uniform, uniform_path);
    const auto model = load_model(output, classes);

    const auto final_fractions = estimated.back().fractions;
    const auto report = class_report(space, final_fractions, classes);

    // Observed statistics for the last simulated year, when the corpus covers it.
    const int last_year = config.training.last + config.horizon;
    std::optional<ClassReport> observed;
    if (last_year <= config.window.last) {
        const auto events = load(config, output);
        observed = class_report(space, observed_occupancy(events, classes, space, last_year), classes);
    }
    write_class_report(output / files::class_report, report, observed ? &*observed : nullptr);

    const auto subset = class_subset(classes, config.dutch_only);
    write_age_report(output / files::age_report, age_report(space, final_fractions, subset));
    write_triad_report(output / files::triad_report, triad_report(model.contact, subset));
    write_baseline_diff(output / files::baseline_diff,
                        baseline_comparison(report, class_report(space, uniform.back().fractions, classes)));
    log << "analyze: reports for " << classes.size() << " classes written to " << output.string() << '\n';
}

void run_stage(std::string_view name, const Config &config, const fs::path &output, std::ostream &log)
{
    config.validate();
    if (name == "synth")
        run_synth(config, output, log);
    else if (name == "ingest")
        run_ingest(config, output, log);
    else if (name == "abstract")
        run_abstract(config, output, log);
    else if (name == "estimate")
        run_estimate(config, output, log);
    else if (name == "simulate")
        run_simulate(config, output, log);
    else if (name == "baseline")
        run_baseline(config, output, log);
    else if (name == "oracle")
        run_oracle(config, output, log);
    else if (name == "analyze")
        run_analyze(config, output, log);
    else
        throw Error("unknown subcommand '" + std::string(name) + "'");
}

} // namespace mfnet
