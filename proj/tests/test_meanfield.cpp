#include "support.hpp"

#include "mfnet/error.hpp"
#include "mfnet/meanfield.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mfnet;

namespace {

NodeState st(int p, int c, Decade h, ClassId u) { return NodeState{p, c, h, u}; }

OccupancyVector point_mass(const StateSpace &space, std::vector<std::pair<NodeState, double>> masses)
{
    OccupancyVector d{0, std::vector<double>(space.size(), 0.0)};
    for (const auto &[s, m] : masses)
        d.fractions[space.index(s)] += m;
    return d;
}

KappaTable single_entry(const NodeState &a, const NodeState &b, const NodeState &a2, const NodeState &b2)
{
    KappaTable t;
    t.entries[{a, b}] = KappaEntry{1.0, {{1.0, a2, b2}}};
    return t;
}

// Random kappa whose successors only add publications and keep (h, u).
KappaTable random_kappa(std::mt19937_64 &rng, std::size_t classes, int keys)
{
    std::uniform_int_distribution<int> p(0, 12), c(0, 4), h(0, 4);
    std::uniform_int_distribution<ClassId> u(0, static_cast<ClassId>(classes - 1));
    KappaTable t;
    for (int k = 0; k < keys; ++k) {
        const NodeState a{p(rng) % 4, c(rng) % 2, static_cast<Decade>(h(rng)), u(rng)};
        const NodeState b{p(rng) % 4, c(rng) % 2, static_cast<Decade>(h(rng)), u(rng)};
        KappaEntry e;
        e.observations = 1;
        const int outcomes = 1 + static_cast<int>(rng() % 3);
        double left = 1.0;
        for (int o = 0; o < outcomes; ++o) {
            const double prob = o + 1 == outcomes ? left : left * 0.5;
            left -= prob;
            e.successors.push_back({prob, NodeState{std::min(12, a.p + 1 + o), std::min(4, a.c + o % 2), a.h, a.u},
                                    NodeState{std::min(12, b.p + 1), std::min(4, b.c + 1), b.h, b.u}});
        }
        t.entries[{a, b}] = e;
    }
    return t;
}

OccupancyVector random_occupancy(std::mt19937_64 &rng, const StateSpace &space)
{
    OccupancyVector d{0, std::vector<double>(space.size(), 0.0)};
    double total = 0.0;
    for (auto &f : d.fractions)
        if (rng() % 3 == 0)
            total += f = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    for (auto &f : d.fractions)
        f /= total;
    return d;
}

} // namespace

TEST_CASE("state enumeration")
{
    CHECK(StateSpace(1).size() == 325);
    CHECK(StateSpace(157).size() == 51025);
    const StateSpace space(3);
    for (StateIndex i = 0; i < space.size(); ++i) {
        const auto s = space.state(i);
        CHECK(space.index(s) == i);
        CHECK(space.class_of(i) == s.u);
        const auto r = space.state(space.reset_index(i));
        CHECK(r == st(0, 0, s.h, s.u));
    }
    CHECK_THROWS_AS(space.index(st(13, 0, Decade::s1970, 0)), DomainError);
    CHECK_THROWS_AS(space.index(st(0, 0, Decade::s1970, 3)), Error);
    CHECK_THROWS_AS(enumerate_states(ClassMap{}), DomainError);
}

TEST_CASE("initialize_year")
{
    const StateSpace space(2);
    const auto d = point_mass(space, {{st(2, 1, Decade::s1990, 0), 0.3}, {st(5, 3, Decade::s1990, 0), 0.7}});
    const auto r = initialize_year(space, d);
    CHECK(r.fractions[space.index(st(0, 0, Decade::s1990, 0))] == doctest::Approx(1.0));

    const auto split = point_mass(space, {{st(4, 2, Decade::s1990, 0), 0.4}, {st(1, 1, Decade::s1980, 1), 0.6}});
    const auto r2 = initialize_year(space, split);
    int nonzero = 0;
    for (double f : r2.fractions)
        nonzero += f != 0.0;
    CHECK(nonzero == 2);
    CHECK(r2.fractions[space.index(st(0, 0, Decade::s1990, 0))] == 0.4);
    CHECK(r2.fractions[space.index(st(0, 0, Decade::s1980, 1))] == 0.6);
    CHECK(initialize_year(space, r2).fractions == r2.fractions);
}

TEST_CASE("step")
{
    const auto m = TransitionOperator::dense(2, {0.9, 0.1, 0.2, 0.8});
    const auto next = step(OccupancyVector{0, {1.0, 0.0}}, m);
    CHECK(next.fractions[0] == doctest::Approx(0.9));
    CHECK(next.fractions[1] == doctest::Approx(0.1));
    CHECK(next.week == 1);

    auto d = OccupancyVector{0, {0.3, 0.7}};
    for (int i = 0; i < 1000; ++i)
        d = step(d, m);
    CHECK(d.fractions[0] + d.fractions[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.fractions[0] == doctest::Approx(2.0 / 3)); // stationary point

    const auto identity = TransitionOperator::sparse({{{0, 1.0}}, {{1, 1.0}}});
    CHECK(step(OccupancyVector{0, {0.25, 0.75}}, identity).fractions == std::vector<double>{0.25, 0.75});
    CHECK_THROWS_AS(step(OccupancyVector{0, {1.0}}, m), MismatchError);
}

TEST_CASE("zero contact gives the identity operator")
{
    const StateSpace space(2);
    std::mt19937_64 rng(1);
    const auto model = make_model(space, {0.0, 0.0}, {{1, 1}, {1, 1}}, random_kappa(rng, 2, 20));
    const auto d = random_occupancy(rng, space);
    for (std::size_t threshold : {std::size_t{0}, std::size_t{10000}}) {
        const auto m = build_operator(d, model, {threshold});
        for (StateIndex a = 0; a < space.size(); a += 7)
            for (StateIndex b = 0; b < space.size(); b += 5)
                CHECK(m.at(b, a) == (a == b ? 1.0 : 0.0));
    }
    const auto zero_selection = make_model(space, {0.5, 0.5}, {{0, 0}, {0, 0}}, random_kappa(rng, 2, 20));
    const auto m = build_operator(d, zero_selection);
    for (StateIndex a = 0; a < space.size(); ++a)
        CHECK(m.at(a, a) == 1.0);
}

TEST_CASE("single-entry operator matches the pairing formula")
{
    const StateSpace space(1);
    const auto A = st(0, 0, Decade::s1990, 0), B = st(0, 0, Decade::s2000, 0);
    const auto A2 = st(1, 1, Decade::s1990, 0), B2 = st(1, 1, Decade::s2000, 0);
    const double q = 0.2;
    const auto model = make_model(space, {q}, {{1.0}}, single_entry(A, B, A2, B2));
    const auto d = point_mass(space, {{A, 0.4}, {B, 0.6}});
    const auto m = build_operator(d, model);

    // A initiates (q), is not picked (exp(-r)), picks a B (0.6) that neither
    // initiates nor is picked by anyone else. r = q for a single class.
    const double free = (1.0 - q) * std::exp(-q);
    const double a_moves = q * std::exp(-q) * 0.6 * free;
    const double b_moves = free * q * std::exp(-q) * 0.4;
    CHECK(m.at(space.index(A2), space.index(A)) == doctest::Approx(a_moves).epsilon(1e-12));
    CHECK(m.at(space.index(A), space.index(A)) == doctest::Approx(1.0 - a_moves).epsilon(1e-12));
    CHECK(m.at(space.index(A), space.index(A)) >= 1.0 - q);
    CHECK(m.at(space.index(B2), space.index(B)) == doctest::Approx(b_moves).epsilon(1e-12));
    CHECK(m.column_sum(space.index(A)) == doctest::Approx(1.0).epsilon(1e-15));

    const auto next = step(d, m);
    CHECK(next.fractions[space.index(A2)] == doctest::Approx(0.4 * a_moves));
    CHECK(next.fractions[space.index(B2)] == doctest::Approx(0.6 * b_moves));
    // each interaction moves one A and one B
    CHECK(next.fractions[space.index(A2)] == doctest::Approx(next.fractions[space.index(B2)]));
}

TEST_CASE("random operators are column stochastic, dense and sparse agree")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t k = 1 + trial % 3;
        const StateSpace space(k);
        std::vector<double> gate(k);
        std::vector<std::vector<double>> sel(k, std::vector<double>(k));
        for (std::size_t u = 0; u < k; ++u) {
            gate[u] = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            for (auto &w : sel[u])
                w = rng() % 3 == 0 ? 0.0 : std::uniform_real_distribution<double>(0.0, 2.0)(rng);
        }
        const auto model = make_model(space, gate, sel, random_kappa(rng, k, 60));
        const auto d = random_occupancy(rng, space);
        const auto sparse = build_operator(d, model, {0});
        const auto dense = build_operator(d, model, {1u << 20});
        CHECK_FALSE(sparse.is_dense());
        CHECK(dense.is_dense());
        CHECK_FALSE(sparse.has_negative_entry());
        for (StateIndex a = 0; a < space.size(); ++a) {
            CHECK(std::abs(sparse.column_sum(a) - 1.0) < 1e-12);
            for (StateIndex b = 0; b < space.size(); b += 3)
                CHECK(sparse.at(b, a) == doctest::Approx(dense.at(b, a)).epsilon(1e-14));
        }
    }
}

TEST_CASE("empty partner classes are skipped")
{
    const StateSpace space(2);
    const auto A = st(0, 0, Decade::s1990, 0), A2 = st(1, 1, Decade::s1990, 0);
    const auto model = make_model(space, {0.5, 0.5}, {{0, 1}, {1, 0}}, single_entry(A, A, A2, A2));
    // class 1 is empty, so class 0 has no partner class left
    const auto d = point_mass(space, {{A, 1.0}});
    const auto rates = pairing_rates(model, d.fractions);
    CHECK(rates.gate[0] == 0.0);
    const auto m = build_operator(d, model);
    CHECK(m.at(space.index(A), space.index(A)) == 1.0);
}

TEST_CASE("trajectories conserve mass and keep p within a year")
{
    std::mt19937_64 rng(9);
    const StateSpace space(2);
    const auto model = make_model(space, {0.1, 0.05}, {{1, 2}, {1, 0.5}}, random_kappa(rng, 2, 300));
    const auto initial = random_occupancy(rng, space);
    const auto masses = class_masses(space, initial.fractions);
    TrajectoryOptions opt;
    opt.years = 2;
    const auto snaps = run_trajectory(initial, model, opt);
    REQUIRE(snaps.size() == 104);
    CHECK(snaps.front().week == 1);
    CHECK(snaps.back().week == 104);
    std::vector<double> previous_tail(13, 0.0);
    for (std::size_t t = 0; t < snaps.size(); ++t) {
        check_occupancy(snaps[t]);
        const auto m = class_masses(space, snaps[t].fractions);
        for (std::size_t u = 0; u < 2; ++u)
            CHECK(std::abs(m[u] - masses[u]) < 1e-12);
        // mass at p >= k never shrinks inside a year
        std::vector<double> tail(13, 0.0);
        for (StateIndex i = 0; i < space.size(); ++i)
            for (int k = 0; k <= space.state(i).p; ++k)
                tail[k] += snaps[t].fractions[i];
        if (t % 52 != 0)
            for (int k = 1; k < 13; ++k)
                CHECK(tail[k] >= previous_tail[k] - 1e-15);
        previous_tail = tail;
    }

    opt.cadence = SnapshotCadence::yearly;
    const auto yearly = run_trajectory(initial, model, opt);
    REQUIRE(yearly.size() == 2);
    CHECK(yearly[1].fractions == snaps.back().fractions);
    // bit-identical reruns
    CHECK(run_trajectory(initial, model, opt)[1].fractions == yearly[1].fractions);
}

TEST_CASE("idle network keeps the initialized state")
{
    const StateSpace space(1);
    const auto model = make_model(space, {0.0}, {{1.0}}, KappaTable{});
    const auto initial = point_mass(space, {{st(3, 2, Decade::s1980, 0), 0.5}, {st(1, 0, Decade::s2000, 0), 0.5}});
    TrajectoryOptions opt;
    const auto snaps = run_trajectory(initial, model, opt);
    const auto reset = initialize_year(space, initial);
    for (const auto &s : snaps)
        CHECK(s.fractions == reset.fractions);
}

TEST_CASE("identical classes evolve identically")
{
    const StateSpace space(2);
    KappaTable t;
    for (ClassId u = 0; u < 2; ++u)
        for (ClassId v = 0; v < 2; ++v)
            for (int p = 0; p < 12; ++p)
                t.entries[{st(p, 0, Decade::s1990, u), st(p, 0, Decade::s1990, v)}] = KappaEntry{
                    1, {{1.0, st(p + 1, 0, Decade::s1990, u), st(p + 1, 0, Decade::s1990, v)}}};
    const auto model = make_model(space, {0.1, 0.1}, {{1, 1}, {1, 1}}, t);
    const auto initial = point_mass(space, {{st(0, 0, Decade::s1990, 0), 0.5}, {st(0, 0, Decade::s1990, 1), 0.5}});
    TrajectoryOptions opt;
    const auto last = run_trajectory(initial, model, opt).back();
    for (int p = 0; p < 13; ++p)
        CHECK(last.fractions[space.index(st(p, 0, Decade::s1990, 0))] ==
              doctest::Approx(last.fractions[space.index(st(p, 0, Decade::s1990, 1))]).epsilon(1e-12));
}

TEST_CASE("compile_model derives gates from contact rows")
{
    const auto classes = ClassMap::from_classes({{"A", {"a"}, 2, false}, {"B", {"b"}, 3, false}});
    SmoothedModel sm;
    sm.contact.class_count = 2;
    sm.contact.weights = {{{0, 1}, 0.5}, {{0, 0}, 0.25}};
    const auto model = compile_model(sm, classes);
    CHECK(model.gate[0] == doctest::Approx(1.0 - std::exp(-0.75 / 52)).epsilon(1e-12));
    CHECK(model.gate[1] == 0.0);
    CHECK(model.selection[0][1] == 0.5);
    ModelOptions linear{WeeklyRule::linear, 52};
    CHECK(compile_model(sm, classes, linear).gate[0] == doctest::Approx((1.0 - std::exp(-0.75)) / 52));
    sm.contact.class_count = 3;
    CHECK_THROWS_AS(compile_model(sm, classes), MismatchError);
}

TEST_CASE("occupancy validation")
{
    CHECK_THROWS_AS(check_occupancy(OccupancyVector{0, {0.5, 0.6}}), DomainError);
    CHECK_THROWS_AS(check_occupancy(OccupancyVector{0, {1.5, -0.5}}), DomainError);
    CHECK_NOTHROW(check_occupancy(OccupancyVector{0, {0.5, 0.5}}));
    const StateSpace space(1);
    CHECK_THROWS_AS(make_model(space, {1.5}, {{1}}, KappaTable{}), DomainError);
    CHECK_THROWS_AS(make_model(space, {0.5, 0.5}, {{1}}, KappaTable{}), MismatchError);
}

TEST_CASE("trajectory CSV round-trip and class checks")
{
    std::mt19937_64 rng(2);
    const StateSpace space(2);
    const auto model = make_model(space, {0.2, 0.2}, {{1, 1}, {1, 1}}, random_kappa(rng, 2, 100));
    TrajectoryOptions opt;
    opt.weeks_per_year = 4;
    const auto snaps = run_trajectory(random_occupancy(rng, space), model, opt);
    testing::TempDir dir("traj");
    write_trajectory(dir / "t.csv", space, snaps);
    const auto back = read_trajectory(dir / "t.csv", space);
    REQUIRE(back.size() == snaps.size());
    for (std::size_t t = 0; t < snaps.size(); ++t) {
        CHECK(back[t].week == snaps[t].week);
        CHECK(back[t].fractions == snaps[t].fractions);
    }
    CHECK_THROWS_AS(read_trajectory(dir / "t.csv", StateSpace(1)), MismatchError);
}

TEST_CASE("compiled kappa lookups")
{
    std::mt19937_64 rng(4);
    const StateSpace space(3);
    const auto table = random_kappa(rng, 3, 200);
    const CompiledKappa kappa(space, table);
    CHECK(kappa.key_count() == table.entries.size());
    for (const auto &[key, entry] : table.entries) {
        const auto out = kappa.joint(space.index(key.first), space.index(key.second));
        REQUIRE(out.size() == entry.successors.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            CHECK(out[i].probability == entry.successors[i].probability);
            CHECK(out[i].a == space.index(entry.successors[i].a));
        }
    }
    std::size_t seen = 0;
    for (StateIndex s = 0; s < space.size(); ++s) {
        for (const auto &k : kappa.with_first(s))
            CHECK(k.a == s);
        for (const auto &k : kappa.with_second(s))
            CHECK(k.b == s);
        seen += kappa.with_second(s).size();
    }
    CHECK(seen == table.entries.size());
}
