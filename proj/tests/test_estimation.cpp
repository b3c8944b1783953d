#include "support.hpp"

#include "mfnet/error.hpp"
#include "mfnet/estimation.hpp"
#include "mfnet/serialization.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace mfnet;
using namespace testing;

namespace {

ClassMap two_classes(int ma, int mb)
{
    return ClassMap::from_classes({{"A", {"ia"}, ma, false}, {"B", {"ib"}, mb, false}});
}

const std::vector<AffiliationRecord> kTwoInstitutions{institution("ia", "DE"), institution("ib", "FR"),
                                                      institution("ic", "US")};

NodeState st(int p, int c, Decade h, ClassId u) { return NodeState{p, c, h, u}; }

// x debuts in the 1990s, y in the 2000s; both meet once in 2007.
EventLog kappa_log(std::vector<PublicationRecord> extra = {}, std::vector<AuthorRecord> extra_authors = {})
{
    std::vector<PublicationRecord> pubs{paper("d1", 1995, {"x"}), paper("d2", 2005, {"y"}),
                                        paper("q1", 2007, {"x", "y"})};
    pubs.insert(pubs.end(), extra.begin(), extra.end());
    std::vector<AuthorRecord> authors{author("x", "ia"), author("y", "ib")};
    authors.insert(authors.end(), extra_authors.begin(), extra_authors.end());
    return EventLog(pubs, authors, kTwoInstitutions);
}

ClassMap three_classes()
{
    return ClassMap::from_classes({{"A", {"ia"}, 2, false}, {"B", {"ib"}, 2, false}, {"C", {"ic"}, 3, false}});
}

} // namespace

TEST_CASE("pair probability")
{
    CHECK(pair_probability(2, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(pair_probability(4, 10) - 0.025) < 1e-12);
    CHECK_THROWS_AS(pair_probability(0, 5), DomainError);
    CHECK_THROWS_AS(pair_probability(3, 0), DomainError);
}

TEST_CASE("contact of a three-author paper")
{
    const EventLog log({paper("p", 2007, {"a1", "a2", "b1"})},
                       {author("a1", "ia"), author("a2", "ia"), author("b1", "ib")}, kTwoInstitutions);
    const auto contact = compute_contact(log, two_classes(2, 1), 2007);
    // hand count: two (a, b1) pairs at 1 / (m(A) c) = 1/6 each
    CHECK(std::abs(contact.weight(0, 1) - 1.0 / 3.0) < 1e-12);
    CHECK(std::abs(contact.weight(1, 0) - 2.0 / 3.0) < 1e-12); // two pairs at 1 / (1 * 3)
    CHECK(std::abs(contact.weight(0, 0) - 1.0 / 3.0) < 1e-12); // within-class pairs
    CHECK(contact.weight(1, 1) == 0.0);
    CHECK(contact.year == 2007);
    CHECK(compute_contact(log, two_classes(2, 1), 2008).weights.empty());
}

TEST_CASE("contact without cross-class papers has no cross weights")
{
    const EventLog log({paper("p", 2007, {"a1"}), paper("q", 2007, {"b1"})}, {author("a1", "ia"), author("b1", "ib")},
                       kTwoInstitutions);
    CHECK(compute_contact(log, two_classes(1, 1), 2007).weights.empty());
}

TEST_CASE("symmetric setup gives symmetric contact")
{
    const EventLog log({paper("p", 2007, {"a1", "b1"}), paper("q", 2007, {"b2", "a2", "a1"}),
                        paper("r", 2007, {"a2", "b1", "b2"})},
                       {author("a1", "ia"), author("a2", "ia"), author("b1", "ib"), author("b2", "ib")},
                       kTwoInstitutions);
    const auto c = compute_contact(log, two_classes(2, 2), 2007);
    CHECK(c.weight(0, 1) == doctest::Approx(c.weight(1, 0)));
}

TEST_CASE("contact is additive over papers and ignores ids and author order")
{
    std::mt19937_64 rng(7);
    std::vector<AuthorRecord> authors;
    for (int i = 0; i < 12; ++i)
        authors.push_back(author("a" + std::to_string(i), i % 3 == 0 ? "ia" : i % 3 == 1 ? "ib" : "ic"));
    const auto classes = three_classes();
    const auto fixed = ClassMap::from_classes({{"A", {"ia"}, 4, false}, {"B", {"ib"}, 4, false},
                                               {"C", {"ic"}, 4, false}});
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<PublicationRecord> first, second, renamed;
        for (int k = 0; k < 10; ++k) {
            std::vector<std::string> team;
            for (int i = 0; i < 12; ++i)
                if (rng() % 4 == 0)
                    team.push_back("a" + std::to_string(i));
            if (team.empty())
                team.push_back("a0");
            auto p = paper("p" + std::to_string(k), 2007, team);
            (k % 2 ? first : second).push_back(p);
            std::shuffle(p.author_ids.begin(), p.author_ids.end(), rng);
            p.paper_id = "z" + std::to_string(100 - k);
            renamed.push_back(p);
        }
        std::vector<PublicationRecord> all = first;
        all.insert(all.end(), second.begin(), second.end());
        const auto whole = compute_contact(EventLog(all, authors, kTwoInstitutions), fixed, 2007);
        const auto c1 = compute_contact(EventLog(first, authors, kTwoInstitutions), fixed, 2007);
        const auto c2 = compute_contact(EventLog(second, authors, kTwoInstitutions), fixed, 2007);
        const auto again = compute_contact(EventLog(renamed, authors, kTwoInstitutions), fixed, 2007);
        for (ClassId a = 0; a < 3; ++a)
            for (ClassId b = 0; b < 3; ++b) {
                CHECK(whole.weight(a, b) == doctest::Approx(c1.weight(a, b) + c2.weight(a, b)));
                CHECK(whole.weight(a, b) == doctest::Approx(again.weight(a, b)));
            }
    }
    (void)classes;
}

TEST_CASE("kappa from a single observation")
{
    const auto log = kappa_log();
    const auto table = compute_kappa(log, two_classes(1, 1), 2007);
    const auto key = StatePair{st(0, 0, Decade::s1990, 0), st(0, 0, Decade::s2000, 1)};
    REQUIRE(table.entries.contains(key));
    const auto &entry = table.entries.at(key);
    REQUIRE(entry.successors.size() == 1);
    CHECK(entry.successors[0].probability == 1.0);
    CHECK(entry.successors[0].a == st(1, 1, Decade::s1990, 0));
    CHECK(entry.successors[0].b == st(1, 1, Decade::s2000, 1));
    CHECK(entry.observations == 1.0);
    // the same paper seen from the other author
    CHECK(table.entries.size() == 2);
    const auto &mirror = table.entries.at({key.second, key.first});
    CHECK(mirror.successors[0].a == st(1, 1, Decade::s2000, 1));

    CHECK(compute_kappa(log, two_classes(1, 1), 2009).entries.empty());
}

TEST_CASE("kappa frequencies")
{
    // x2/y2 share the start states of x/y but write with three more people
    const auto log = kappa_log({paper("d3", 1995, {"x2"}), paper("d4", 2005, {"y2"}), paper("d5", 2001, {"w1"}),
                                paper("d6", 2001, {"w2"}), paper("d7", 2001, {"w3"}),
                                paper("q2", 2007, {"x2", "y2", "w1", "w2", "w3"})},
                               {author("x2", "ia"), author("y2", "ib"), author("w1", "ic"), author("w2", "ic"),
                                author("w3", "ic")});
    const auto table = compute_kappa(log, three_classes(), 2007);
    table.validate();
    const auto &entry = table.entries.at({st(0, 0, Decade::s1990, 0), st(0, 0, Decade::s2000, 1)});
    REQUIRE(entry.successors.size() == 2);
    CHECK(entry.successors[0].probability == 0.5);
    CHECK(entry.successors[1].probability == 0.5);
    CHECK(entry.observations == 2.0);
}

TEST_CASE("kappa uses year-to-date states in paper_id order")
{
    const auto log = kappa_log({paper("q0", 2007, {"x"}), paper("q2", 2007, {"x", "y"})});
    const auto table = compute_kappa(log, two_classes(1, 1), 2007);
    // q1: x already has the solo q0 (1, 0); q2: x at (2, 1), y at (1, 1).
    // After q2 x has one coauthor over three papers, so c drops back to 0.
    CHECK(table.entries.contains({st(1, 0, Decade::s1990, 0), st(0, 0, Decade::s2000, 1)}));
    const auto &later = table.entries.at({st(2, 1, Decade::s1990, 0), st(1, 1, Decade::s2000, 1)});
    CHECK(later.successors[0].a == st(3, 0, Decade::s1990, 0));
    CHECK(later.successors[0].b == st(2, 1, Decade::s2000, 1));
}

TEST_CASE("kappa successors sum to one on random logs")
{
    std::mt19937_64 rng(99);
    std::vector<AuthorRecord> authors;
    std::vector<PublicationRecord> pubs;
    for (int i = 0; i < 20; ++i) {
        authors.push_back(author("a" + std::to_string(i), i % 2 ? "ia" : "ib"));
        pubs.push_back(paper("d" + std::to_string(i), 1971 + static_cast<int>(rng() % 35), {authors.back().author_id}));
    }
    for (int k = 0; k < 200; ++k) {
        std::vector<std::string> team;
        for (int i = 0; i < 20; ++i)
            if (rng() % 6 == 0)
                team.push_back("a" + std::to_string(i));
        if (!team.empty())
            pubs.push_back(paper("p" + std::to_string(k), 2007, team));
    }
    const auto table = compute_kappa(EventLog(pubs, authors, kTwoInstitutions), two_classes(10, 10), 2007);
    CHECK_FALSE(table.entries.empty());
    for (const auto &[key, entry] : table.entries) {
        double sum = 0.0;
        for (const auto &s : entry.successors) {
            sum += s.probability;
            CHECK(s.a.p >= key.first.p); // publications only accumulate
            CHECK(s.b.p >= key.second.p);
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("annual to weekly")
{
    CHECK(annual_to_weekly(0.0) == 0.0);
    CHECK(annual_to_weekly(1.0) == 1.0);
    const double w = annual_to_weekly(0.5);
    CHECK(w == doctest::Approx(0.013245).epsilon(1e-4));
    CHECK(std::abs(std::pow(1.0 - w, 52) - 0.5) < 1e-10);
    double previous = -1.0;
    for (int i = 0; i <= 1000; ++i) {
        const double p = i / 1000.0;
        const double q = annual_to_weekly(p);
        CHECK(q > previous);
        previous = q;
        CHECK(std::abs(1.0 - std::pow(1.0 - q, 52) - p) < 1e-10);
    }
    CHECK(annual_to_weekly(0.52, WeeklyRule::linear) == doctest::Approx(0.01));
    CHECK(annual_to_weekly(0.5, WeeklyRule::geometric, 12) == doctest::Approx(1.0 - std::pow(0.5, 1.0 / 12)));
    CHECK_THROWS_AS(annual_to_weekly(1.5), DomainError);
    CHECK_THROWS_AS(annual_to_weekly(-0.1), DomainError);
}

TEST_CASE("decay model is the identity")
{
    const auto s = st(4, 2, Decade::s1980, 3);
    const auto idle = DecayModel::idle(s);
    REQUIRE(idle.size() == 1);
    CHECK(idle[0].first == 1.0);
    CHECK(idle[0].second == s);
    CHECK(DecayModel::collision(s)[0].second == s);
}

namespace {

YearTables year_with(double w, int year)
{
    YearTables t;
    t.contact.year = year;
    t.contact.class_count = 2;
    t.contact.weights[{0, 1}] = w;
    t.kappa.year = year;
    return t;
}

std::vector<YearTables> constant_years(int count)
{
    std::vector<YearTables> years;
    for (int y = 0; y < count; ++y) {
        YearTables t;
        t.contact.year = 2006 + y;
        t.contact.class_count = 2;
        t.contact.weights = {{{0, 0}, 0.4}, {{0, 1}, 1.5}, {{1, 0}, 0.25}};
        KappaEntry e;
        e.observations = 4;
        e.successors = {{0.75, st(1, 1, Decade::s1990, 0), st(1, 1, Decade::s2000, 1)},
                        {0.25, st(2, 1, Decade::s1990, 0), st(1, 1, Decade::s2000, 1)}};
        t.kappa.entries[{st(0, 0, Decade::s1990, 0), st(0, 0, Decade::s2000, 1)}] = e;
        KappaEntry f;
        f.observations = 2;
        f.successors = {{1.0, st(1, 1, Decade::s2000, 1), st(1, 1, Decade::s1990, 0)}};
        t.kappa.entries[{st(0, 0, Decade::s2000, 1), st(0, 0, Decade::s1990, 0)}] = f;
        years.push_back(t);
    }
    return years;
}

} // namespace

TEST_CASE("mean fallback averages the years")
{
    const std::vector<YearTables> years{year_with(0.2, 2006), year_with(0.4, 2007)};
    HmmConfig config;
    config.method = SmoothingMethod::mean;
    const auto model = estimate_smoothed(years, config);
    CHECK(model.fallback_used);
    CHECK(std::abs(model.contact.weight(0, 1) - (0.3 + config.epsilon)) < 1e-15);
    CHECK(std::abs(model.contact.weight(0, 1) - 0.3) <= config.epsilon * (1 + 1e-9));
    CHECK_FALSE(model.contact.year.has_value());

    const auto single = estimate_smoothed(std::vector<YearTables>{year_with(0.2, 2006)});
    CHECK(single.fallback_used);
    CHECK(single.contact.weight(0, 1) == doctest::Approx(0.2));
}

TEST_CASE("smoothing a constant sequence returns the table")
{
    const auto years = constant_years(3);
    const auto model = estimate_smoothed(years);
    CHECK_FALSE(model.fallback_used);
    for (const auto &[key, w] : years[0].contact.weights)
        CHECK(model.contact.weight(key.first, key.second) == doctest::Approx(w).epsilon(1e-4));
    model.kappa.validate();
    for (const auto &[key, entry] : years[0].kappa.entries) {
        const auto &smoothed = model.kappa.entries.at(key);
        REQUIRE(smoothed.successors.size() == entry.successors.size());
        for (std::size_t i = 0; i < entry.successors.size(); ++i)
            CHECK(smoothed.successors[i].probability == doctest::Approx(entry.successors[i].probability).epsilon(1e-4));
    }

    HmmConfig mean;
    mean.method = SmoothingMethod::mean;
    const auto fallback = estimate_smoothed(years, mean);
    fallback.kappa.validate();
    CHECK(fallback.contact.weight(0, 1) == doctest::Approx(1.5));
}

TEST_CASE("smoothing is deterministic for a seed")
{
    auto years = constant_years(3);
    years[1].contact.weights[{0, 1}] = 0.7;
    years[2].kappa.entries.begin()->second.successors[0].probability = 0.5;
    years[2].kappa.entries.begin()->second.successors[1].probability = 0.5;
    const auto a = to_json(estimate_smoothed(years)).dump();
    const auto b = to_json(estimate_smoothed(years)).dump();
    CHECK(a == b);
    CHECK_THROWS_AS(estimate_smoothed(std::vector<YearTables>{}), DomainError);
    years[1].contact.class_count = 3;
    CHECK_THROWS_AS(estimate_smoothed(years), MismatchError);
}

TEST_CASE("uniform baseline")
{
    const auto equal = uniform_baseline(two_classes(1, 1));
    CHECK(equal.weight(0, 0) == equal.weight(0, 1));
    CHECK(equal.weight(1, 0) == equal.weight(1, 1));
    CHECK(equal.weight(0, 0) == equal.weight(1, 1));

    const auto skewed = uniform_baseline(two_classes(2, 1));
    CHECK(skewed.weight(0, 1) / skewed.weight(1, 0) == doctest::Approx(1.0));
    CHECK(skewed.weight(0, 0) / skewed.weight(1, 1) == doctest::Approx(4.0));

    const auto single = uniform_baseline(ClassMap::from_classes({{"A", {"ia"}, 5, false}}));
    CHECK(single.weight(0, 0) == doctest::Approx(1.0));
    CHECK(single.total() == doctest::Approx(1.0));
    CHECK_THROWS_AS(uniform_baseline(ClassMap{}), DomainError);
}

TEST_CASE("rescaled baseline keeps the yearly interaction count")
{
    const auto classes = ClassMap::from_classes({{"A", {"ia"}, 3, false}, {"B", {"ib"}, 1, false}});
    ContactMatrix reference;
    reference.class_count = 2;
    reference.weights = {{{0, 1}, 0.6}, {{1, 0}, 1.8}, {{0, 0}, 0.2}};
    const auto rates = rescale_like(uniform_baseline(classes), reference, classes);
    const double expected_total = 0.6 * 3 + 1.8 * 1 + 0.2 * 3;
    double total = 0.0;
    for (const auto &[key, w] : rates.weights)
        total += w * classes.population(key.first);
    CHECK(total == doctest::Approx(expected_total));
    // every node gets the same rate
    CHECK(rates.row_sum(0) == doctest::Approx(rates.row_sum(1)));
    // and the same class preference as everyone else
    CHECK(rates.weight(0, 0) / rates.weight(0, 1) == doctest::Approx(3.0));
}

TEST_CASE("observed occupancy")
{
    const auto log = kappa_log({paper("d3", 2001, {"z"})}, {author("z", "ia")});
    const auto classes = two_classes(2, 1);
    const StateSpace space(2);
    const auto occ = observed_occupancy(log, classes, space, 2007);
    double total = 0.0;
    for (double f : occ)
        total += f;
    CHECK(total == doctest::Approx(1.0));
    CHECK(occ[space.index(st(1, 1, Decade::s1990, 0))] == doctest::Approx(1.0 / 3));
    CHECK(occ[space.index(st(0, 0, Decade::s2000, 0))] == doctest::Approx(1.0 / 3));
    CHECK(occ[space.index(st(1, 1, Decade::s2000, 1))] == doctest::Approx(1.0 / 3));
}
