#include "mfnet/estimation.hpp"

#include "mfnet/error.hpp"
#include "mfnet/hmm.hpp"

#include <cmath>
#include <set>
#include <string>

namespace mfnet {

double ContactMatrix::weight(ClassId from, ClassId to) const
{
    auto it = weights.find({from, to});
    return it == weights.end() ? 0.0 : it->second;
}

double ContactMatrix::row_sum(ClassId from) const
{
    double sum = 0.0;
    for (auto it = weights.lower_bound({from, 0}); it != weights.end() && it->first.first == from; ++it)
        sum += it->second;
    return sum;
}

double ContactMatrix::total() const
{
    double sum = 0.0;
    for (const auto &[key, w] : weights)
        sum += w;
    return sum;
}

void ContactMatrix::validate() const
{
    for (const auto &[key, w] : weights) {
        if (key.first >= class_count || key.second >= class_count)
            throw MismatchError("contact weight references class outside the class map");
        if (!(w >= 0.0) || !std::isfinite(w))
            throw DomainError("contact weights must be finite and non-negative");
    }
}

void KappaTable::validate() const
{
    for (const auto &[key, entry] : entries) {
        check_bins(key.first);
        check_bins(key.second);
        double sum = 0.0;
        for (const auto &s : entry.successors) {
            if (!(s.probability >= 0.0))
                throw DomainError("negative kappa probability");
            check_bins(s.a);
            check_bins(s.b);
            if (s.a.h != key.first.h || s.a.u != key.first.u || s.b.h != key.second.h || s.b.u != key.second.u)
                throw DomainError("kappa successor changes scientific age or class");
            sum += s.probability;
        }
        if (entry.successors.empty() || std::abs(sum - 1.0) > 1e-12)
            throw DomainError("kappa successor distribution does not sum to 1");
    }
}

double pair_probability(int author_count, int class_population)
{
    if (author_count <= 0)
        throw DomainError("paper with no authors");
    if (class_population <= 0)
        throw DomainError("empty class");
    return 1.0 / (static_cast<double>(class_population) * static_cast<double>(author_count));
}

ContactMatrix compute_contact(const EventLog &log, const ClassMap &classes, int year)
{
    ContactMatrix contact;
    contact.year = year;
    contact.class_count = classes.size();
    for (const auto *pub : log.publications_in(year)) {
        const int c_i = static_cast<int>(pub->author_ids.size());
        std::vector<ClassId> cls;
        cls.reserve(pub->author_ids.size());
        for (const auto &id : pub->author_ids)
            cls.push_back(class_of_author(log, classes, id));
        for (std::size_t x = 0; x < cls.size(); ++x)
            for (std::size_t y = 0; y < cls.size(); ++y) {
                if (x == y)
                    continue;
                contact.weights[{cls[x], cls[y]}] += pair_probability(c_i, classes.population(cls[x]));
            }
    }
    return contact;
}

NodeState binned_state(const AnnualProfile &profile, Decade h, ClassId u)
{
    return NodeState{cap_annual_publications(profile.publications),
                     relative_coauthor_count(profile.unique_coauthors, profile.publications), h, u};
}

KappaTable compute_kappa(const EventLog &log, const ClassMap &classes, int year)
{
    struct Running {
        int publications = 0;
        std::set<std::string> coauthors;
        Decade h;
        ClassId u;
    };
    std::map<std::string, Running, std::less<>> running;
    std::map<StatePair, std::map<StatePair, double>> counts;

    for (const auto *pub : log.publications_in(year)) {
        std::vector<Running *> authors;
        for (const auto &id : pub->author_ids) {
            auto it = running.find(id);
            if (it == running.end()) {
                Running r;
                r.h = scientific_age_bin(first_publication_year(log, id));
                r.u = class_of_author(log, classes, id);
                it = running.emplace(id, std::move(r)).first;
            }
            authors.push_back(&it->second);
        }
        auto state_of = [](const Running &r) {
            return binned_state(AnnualProfile{r.publications, static_cast<int>(r.coauthors.size())}, r.h, r.u);
        };
        std::vector<NodeState> before;
        for (const auto *r : authors)
            before.push_back(state_of(*r));
        for (std::size_t i = 0; i < authors.size(); ++i) {
            ++authors[i]->publications;
            for (std::size_t j = 0; j < authors.size(); ++j)
                if (i != j)
                    authors[i]->coauthors.insert(pub->author_ids[j]);
        }
        std::vector<NodeState> after;
        for (const auto *r : authors)
            after.push_back(state_of(*r));
        for (std::size_t x = 0; x < authors.size(); ++x)
            for (std::size_t y = 0; y < authors.size(); ++y)
                if (x != y)
                    counts[{before[x], before[y]}][{after[x], after[y]}] += 1.0;
    }

    KappaTable table;
    table.year = year;
    for (const auto &[key, successors] : counts) {
        KappaEntry entry;
        for (const auto &[next, n] : successors)
            entry.observations += n;
        for (const auto &[next, n] : successors)
            entry.successors.push_back(KappaSuccessor{n / entry.observations, next.first, next.second});
        table.entries.emplace(key, std::move(entry));
    }
    table.validate();
    return table;
}

std::vector<double> observed_occupancy(const EventLog &log, const ClassMap &classes, const StateSpace &space,
                                       int year)
{
    std::vector<double> fractions(space.size(), 0.0);
    double total = 0.0;
    for (const auto &[id, author] : log.authors()) {
        const auto first = log.first_year(id);
        if (!first)
            continue;
        const auto u = classes.find_class(author.affiliation_id);
        if (!u)
            continue;
        const auto s = binned_state(annual_profile(log, id, year), scientific_age_bin(*first), *u);
        fractions[space.index(s)] += 1.0;
        total += 1.0;
    }
    if (total == 0.0)
        throw DomainError("no authors to build an occupancy from");
    for (double &f : fractions)
        f /= total;
    return fractions;
}

double annual_to_weekly(double p_year, WeeklyRule rule, int weeks_per_year)
{
    if (!(p_year >= 0.0 && p_year <= 1.0))
        throw DomainError("annual probability outside [0, 1]");
    if (weeks_per_year <= 0)
        throw DomainError("weeks per year must be positive");
    if (rule == WeeklyRule::linear)
        return p_year / weeks_per_year;
    if (p_year == 1.0)
        return 1.0;
    // -expm1(log1p(-p) / w) keeps precision for small p
    return -std::expm1(std::log1p(-p_year) / weeks_per_year);
}

namespace {

std::size_t common_class_count(std::span<const YearTables> yearly)
{
    if (yearly.empty())
        throw DomainError("no training years");
    const auto n = yearly.front().contact.class_count;
    for (const auto &y : yearly)
        if (y.contact.class_count != n)
            throw MismatchError("training years use different class maps");
    return n;
}

using KappaSymbol = std::pair<StatePair, StatePair>;

std::map<KappaSymbol, std::vector<double>> kappa_counts(std::span<const YearTables> yearly)
{
    std::map<KappaSymbol, std::vector<double>> counts;
    for (std::size_t t = 0; t < yearly.size(); ++t)
        for (const auto &[key, entry] : yearly[t].kappa.entries)
            for (const auto &s : entry.successors) {
                auto &row = counts[{key, {s.a, s.b}}];
                row.resize(yearly.size(), 0.0);
                row[t] += entry.observations * s.probability;
            }
    return counts;
}

KappaTable kappa_from_weights(const std::map<KappaSymbol, double> &weights, std::span<const YearTables> yearly)
{
    KappaTable table;
    std::map<StatePair, std::vector<std::pair<StatePair, double>>> grouped;
    for (const auto &[sym, w] : weights)
        grouped[sym.first].emplace_back(sym.second, w);
    for (auto &[key, succ] : grouped) {
        KappaEntry entry;
        double sum = 0.0;
        for (const auto &[next, w] : succ)
            sum += w;
        for (const auto &y : yearly)
            if (auto it = y.kappa.entries.find(key); it != y.kappa.entries.end())
                entry.observations += it->second.observations;
        entry.observations /= static_cast<double>(yearly.size());
        for (const auto &[next, w] : succ)
            entry.successors.push_back(KappaSuccessor{w / sum, next.first, next.second});
        table.entries.emplace(key, std::move(entry));
    }
    return table;
}

HistogramHmmOptions hmm_options(const HmmConfig &config)
{
    HistogramHmmOptions o;
    o.hidden_states = config.hidden_states;
    o.max_iterations = config.max_iterations;
    o.tolerance = config.tolerance;
    o.emission_floor = config.epsilon;
    o.seed = config.seed;
    return o;
}

// Stationary emission mixture over the vocabulary, or nullopt without convergence.
std::optional<std::vector<double>> smoothed_mixture(const std::vector<std::vector<double>> &series_by_symbol,
                                                    std::size_t years, const HmmConfig &config)
{
    std::vector<Histogram> observations(years, Histogram(series_by_symbol.size(), 0.0));
    for (std::size_t v = 0; v < series_by_symbol.size(); ++v)
        for (std::size_t t = 0; t < years; ++t)
            observations[t][v] = series_by_symbol[v][t];
    const auto fit = fit_histogram_hmm(observations, hmm_options(config));
    if (!fit.converged)
        return std::nullopt;
    return emission_mixture(fit.model);
}

} // namespace

SmoothedModel mean_fallback(std::span<const YearTables> yearly, const HmmConfig &config)
{
    const auto class_count = common_class_count(yearly);
    const double years = static_cast<double>(yearly.size());

    SmoothedModel model;
    model.config = config;
    model.fallback_used = true;
    model.contact.class_count = class_count;
    for (const auto &y : yearly)
        for (const auto &[key, w] : y.contact.weights)
            model.contact.weights[key] += w / years;
    for (auto &[key, w] : model.contact.weights)
        w += config.epsilon;

    std::map<StatePair, std::map<StatePair, double>> sums;
    std::map<StatePair, int> seen;
    std::map<StatePair, double> observations;
    for (const auto &y : yearly)
        for (const auto &[key, entry] : y.kappa.entries) {
            ++seen[key];
            observations[key] += entry.observations / years;
            for (const auto &s : entry.successors)
                sums[key][{s.a, s.b}] += s.probability;
        }
    for (const auto &[key, succ] : sums) {
        KappaEntry entry;
        entry.observations = observations[key];
        double total = 0.0;
        for (const auto &[next, p] : succ)
            total += p / seen[key] + config.epsilon;
        for (const auto &[next, p] : succ)
            entry.successors.push_back(KappaSuccessor{(p / seen[key] + config.epsilon) / total, next.first, next.second});
        model.kappa.entries.emplace(key, std::move(entry));
    }
    return model;
}

SmoothedModel estimate_smoothed(std::span<const YearTables> yearly, const HmmConfig &config)
{
    const auto class_count = common_class_count(yearly);
    if (yearly.size() < 2 || config.method == SmoothingMethod::mean)
        return mean_fallback(yearly, config);

    std::map<std::pair<ClassId, ClassId>, std::vector<double>> contact_series;
    for (std::size_t t = 0; t < yearly.size(); ++t)
        for (const auto &[key, w] : yearly[t].contact.weights) {
            auto &row = contact_series[key];
            row.resize(yearly.size(), 0.0);
            row[t] = w;
        }
    const auto kappa_series = kappa_counts(yearly);
    if (contact_series.empty() || kappa_series.empty())
        return mean_fallback(yearly, config);

    std::vector<std::vector<double>> contact_matrix;
    for (const auto &[key, row] : contact_series)
        contact_matrix.push_back(row);
    std::vector<std::vector<double>> kappa_matrix;
    for (const auto &[key, row] : kappa_series)
        kappa_matrix.push_back(row);

    const auto contact_mix = smoothed_mixture(contact_matrix, yearly.size(), config);
    const auto kappa_mix = smoothed_mixture(kappa_matrix, yearly.size(), config);
    if (!contact_mix || !kappa_mix)
        return mean_fallback(yearly, config);

    SmoothedModel model;
    model.config = config;
    model.contact.class_count = class_count;
    double mean_total = 0.0;
    for (const auto &y : yearly)
        mean_total += y.contact.total();
    mean_total /= static_cast<double>(yearly.size());
    std::size_t v = 0;
    for (const auto &[key, row] : contact_series)
        model.contact.weights[key] = (*contact_mix)[v++] * mean_total;

    std::map<KappaSymbol, double> kappa_weights;
    v = 0;
    for (const auto &[sym, row] : kappa_series)
        kappa_weights[sym] = (*kappa_mix)[v++];
    model.kappa = kappa_from_weights(kappa_weights, yearly);
    return model;
}

ContactMatrix uniform_baseline(const ClassMap &classes)
{
    if (classes.empty())
        throw DomainError("uniform baseline of an empty class map");
    const double n = classes.total_population();
    if (n <= 0.0)
        throw DomainError("uniform baseline needs a positive population");
    ContactMatrix contact;
    contact.class_count = classes.size();
    for (ClassId a = 0; a < classes.size(); ++a)
        for (ClassId b = 0; b < classes.size(); ++b)
            contact.weights[{a, b}] = static_cast<double>(classes.population(a)) * classes.population(b) / (n * n);
    return contact;
}

ContactMatrix rescale_like(const ContactMatrix &pair_weights, const ContactMatrix &reference, const ClassMap &classes)
{
    if (pair_weights.class_count != classes.size() || reference.class_count != classes.size())
        throw MismatchError("contact matrices and class map differ in size");
    double interactions = 0.0;
    for (const auto &[key, w] : reference.weights)
        interactions += w * classes.population(key.first);
    const double pair_total = pair_weights.total();
    ContactMatrix out;
    out.year = reference.year;
    out.class_count = classes.size();
    if (pair_total <= 0.0)
        return out;
    for (const auto &[key, w] : pair_weights.weights)
        out.weights[key] = interactions * (w / pair_total) / classes.population(key.first);
    return out;
}

} // namespace mfnet
