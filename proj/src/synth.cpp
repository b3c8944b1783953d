#include "mfnet/synth.hpp"

#include "mfnet/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <random>

namespace mfnet {

namespace {

struct InstitutionSpec {
    const char *id;
    const char *label;
    const char *country;
    double weight;
    double latitude;
    double longitude;
};

// Sizes are deliberately uneven so that some groups pass the dispersion test.
constexpr InstitutionSpec kInstitutions[] = {
    {"nl-uva", "University of Amsterdam", "NL", 14, 52.36, 4.90},
    {"nl-vu", "Vrije Universiteit Amsterdam", "NL", 10, 52.33, 4.86},
    {"nl-tud", "Delft University of Technology", "NL", 16, 52.00, 4.37},
    {"nl-tue", "Eindhoven University of Technology", "NL", 12, 51.45, 5.49},
    {"nl-ut", "University of Twente", "NL", 9, 52.24, 6.85},
    {"nl-uu", "Utrecht University", "NL", 8, 52.09, 5.12},
    {"nl-ru", "Radboud University", "NL", 6, 51.82, 5.87},
    {"nl-rug", "University of Groningen", "NL", 5, 53.22, 6.57},
    {"nl-ul", "Leiden University", "NL", 4, 52.16, 4.49},
    {"nl-cwi", "Centrum Wiskunde & Informatica", "NL", 3, 52.36, 4.95},
    {"nl-um", "Maastricht University", "NL", 1, 50.85, 5.69},
    {"nl-ou", "Open Universiteit", "NL", 1, 50.88, 5.96},
    {"de-tum", "TU Munich", "DE", 6, 48.15, 11.57},
    {"de-kit", "Karlsruhe Institute of Technology", "DE", 2, 49.01, 8.41},
    {"de-rwth", "RWTH Aachen", "DE", 1, 50.78, 6.08},
    {"be-kul", "KU Leuven", "BE", 5, 50.88, 4.70},
    {"be-ugent", "Ghent University", "BE", 1, 51.05, 3.72},
    {"fr-inria", "Inria", "FR", 4, 48.84, 2.10},
    {"gb-ucl", "University College London", "GB", 3, 51.52, -0.13},
    {"us-mit", "MIT", "US", 5, 42.36, -71.09},
    {"us-cmu", "Carnegie Mellon University", "US", 4, 40.44, -79.94},
    {"us-uw", "University of Washington", "US", 1, 47.65, -122.31},
    {"ca-uot", "University of Toronto", "CA", 2, 43.66, -79.40},
    {"jp-ut", "University of Tokyo", "JP", 2, 35.71, 139.76},
    {"cn-thu", "Tsinghua University", "CN", 2, 40.00, 116.33},
    {"au-unsw", "UNSW Sydney", "AU", 1, -33.92, 151.23},
    {"br-usp", "University of Sao Paulo", "BR", 1, -23.56, -46.73},
};

struct SynthAuthor {
    std::string id;
    int institution = -1; // -1: unaffiliated
    int start = 0;
};

} // namespace

SyntheticCorpus synthesize_corpus(const SynthOptions &options, YearWindow window, std::uint64_t seed)
{
    if (options.authors < 2)
        throw DomainError("synthetic corpus needs at least two authors");
    if (window.first > window.last)
        throw DomainError("empty data window");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    SyntheticCorpus corpus;
    std::vector<double> weights;
    for (const auto &inst : kInstitutions) {
        corpus.affiliations.push_back(
            {inst.id, inst.label, inst.country, *continents_of(inst.country).begin(), inst.latitude, inst.longitude});
        weights.push_back(inst.weight);
    }
    std::discrete_distribution<int> pick_institution(weights.begin(), weights.end());

    // Career starts lean towards recent years.
    const int span = window.last - window.first + 1;
    std::vector<SynthAuthor> authors;
    for (int i = 0; i < options.authors; ++i) {
        SynthAuthor a;
        char id[16];
        std::snprintf(id, sizeof id, "a%04d", i);
        a.id = id;
        if (unit(rng) >= options.unaffiliated_share)
            a.institution = pick_institution(rng);
        a.start = window.last - static_cast<int>(std::floor(span * (1.0 - std::sqrt(unit(rng)))));
        a.start = std::clamp(a.start, window.first, window.last);
        authors.push_back(a);
    }

    std::vector<std::vector<int>> by_institution(std::size(kInstitutions));
    std::map<std::string, std::vector<int>> by_country;
    for (int i = 0; i < options.authors; ++i) {
        const auto &a = authors[i];
        if (a.institution < 0)
            continue;
        by_institution[a.institution].push_back(i);
        by_country[kInstitutions[a.institution].country].push_back(i);
    }

    int next_paper = 0;
    auto add_paper = [&](int lead, int year) {
        std::vector<int> team{lead};
        std::poisson_distribution<int> extra(1.2);
        const int k = std::min(extra(rng), 4);
        for (int j = 0; j < k; ++j) {
            const auto &a = authors[lead];
            const std::vector<int> *pool = nullptr;
            const double x = unit(rng);
            if (a.institution >= 0 && x < 0.55)
                pool = &by_institution[a.institution];
            else if (a.institution >= 0 && x < 0.8)
                pool = &by_country[kInstitutions[a.institution].country];
            int candidate;
            if (pool && !pool->empty())
                candidate = (*pool)[std::uniform_int_distribution<std::size_t>(0, pool->size() - 1)(rng)];
            else
                candidate = std::uniform_int_distribution<int>(0, options.authors - 1)(rng);
            if (authors[candidate].start <= year && std::find(team.begin(), team.end(), candidate) == team.end())
                team.push_back(candidate);
        }
        PublicationRecord p;
        char id[16];
        std::snprintf(id, sizeof id, "p%06d", next_paper++);
        p.paper_id = id;
        p.year = year;
        p.venue_kind = unit(rng) < options.article_share ? VenueKind::other : VenueKind::proceedings;
        for (int m : team)
            p.author_ids.push_back(authors[m].id);
        corpus.publications.push_back(std::move(p));
    };

    for (int i = 0; i < options.authors; ++i) {
        const auto &a = authors[i];
        // the debut paper fixes the scientific age
        PublicationRecord debut;
        char id[16];
        std::snprintf(id, sizeof id, "p%06d", next_paper++);
        debut.paper_id = id;
        debut.year = a.start;
        debut.author_ids = {a.id};
        corpus.publications.push_back(std::move(debut));

        for (int year = std::max(a.start + 1, options.first_active_year); year <= window.last; ++year) {
            const double seniority = std::min(1.0, (year - a.start) / 25.0);
            std::poisson_distribution<int> papers(0.4 + 1.2 * seniority);
            for (int n = papers(rng); n > 0; --n)
                add_paper(i, year);
        }
    }

    for (const auto &a : authors)
        corpus.authors.push_back(
            {a.id, a.institution < 0 ? std::string() : std::string(kInstitutions[a.institution].id), "Author " + a.id});
    return corpus;
}

} // namespace mfnet
