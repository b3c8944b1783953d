#include "mfnet/oracle.hpp"

#include "mfnet/csv.hpp"
#include "mfnet/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace mfnet {

AgentPopulation make_population(const StateSpace &space, std::span<const double> fractions, std::size_t n,
                                std::uint64_t seed)
{
    if (fractions.size() != space.size())
        throw MismatchError("occupancy size does not match the state space");
    double total = 0.0;
    for (double f : fractions) {
        if (!(f >= 0.0))
            throw DomainError("negative occupancy fraction");
        total += f;
    }
    if (total <= 0.0)
        throw DomainError("empty occupancy");

    std::vector<std::size_t> count(fractions.size());
    std::vector<std::pair<double, StateIndex>> remainder;
    std::size_t assigned = 0;
    for (StateIndex i = 0; i < fractions.size(); ++i) {
        const double exact = static_cast<double>(n) * fractions[i] / total;
        count[i] = static_cast<std::size_t>(std::floor(exact));
        assigned += count[i];
        if (fractions[i] > 0.0)
            remainder.emplace_back(exact - static_cast<double>(count[i]), i);
    }
    std::stable_sort(remainder.begin(), remainder.end(),
                     [](const auto &x, const auto &y) { return x.first > y.first; });
    for (std::size_t k = 0; assigned < n && k < remainder.size(); ++k, ++assigned)
        ++count[remainder[k].second];

    AgentPopulation pop;
    pop.seed = seed;
    pop.states.reserve(n);
    for (StateIndex i = 0; i < count.size(); ++i)
        pop.states.insert(pop.states.end(), count[i], i);
    return pop;
}

OccupancyVector empirical_occupancy(const StateSpace &space, std::span<const StateIndex> states, int week)
{
    OccupancyVector out{week, std::vector<double>(space.size(), 0.0)};
    for (auto s : states)
        out.fractions[s] += 1.0;
    const double n = static_cast<double>(states.size());
    for (double &f : out.fractions)
        f /= n;
    return out;
}

OracleRun simulate_agents(const AgentPopulation &population, const InteractionModel &model, int years,
                          int weeks_per_year)
{
    const auto &space = model.space;
    const std::size_t n = population.states.size();
    if (n < 2)
        throw DomainError("the oracle needs at least two agents");
    if (years < 1 || weeks_per_year < 1)
        throw DomainError("empty simulation horizon");
    for (auto s : population.states)
        if (s >= space.size())
            throw MismatchError("agent state outside the state space");

    const std::size_t k = space.class_count();
    std::vector<StateIndex> states = population.states;
    std::vector<ClassId> cls(n);
    std::vector<std::vector<std::size_t>> members(k);
    std::vector<std::size_t> position(n);
    for (std::size_t i = 0; i < n; ++i) {
        cls[i] = space.class_of(states[i]);
        position[i] = members[cls[i]].size();
        members[cls[i]].push_back(i);
    }

    // Partner-class distribution per initiator class over classes that hold
    // someone other than the initiator.
    std::vector<std::vector<double>> cumulative(k, std::vector<double>(k, 0.0));
    std::vector<double> gate(k, 0.0);
    for (std::size_t u = 0; u < k; ++u) {
        double sum = 0.0;
        for (std::size_t v = 0; v < k; ++v) {
            const std::size_t available = members[v].size() - (u == v && !members[v].empty() ? 1 : 0);
            if (available > 0)
                sum += model.selection[u][v];
            cumulative[u][v] = sum;
        }
        if (sum > 0.0 && !members[u].empty()) {
            gate[u] = model.gate[u];
            for (double &c : cumulative[u])
                c /= sum;
        }
    }

    std::mt19937_64 rng(population.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    OracleRun run;
    run.seed = population.seed;
    run.agents = n;

    std::vector<std::int64_t> partner(n);
    std::vector<std::uint32_t> involved(n);
    std::vector<std::size_t> initiators;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    int week_index = 0;

    for (int year = 0; year < years; ++year) {
        for (auto &s : states)
            s = space.reset_index(s);
        for (int week = 0; week < weeks_per_year; ++week) {
            std::fill(partner.begin(), partner.end(), -1);
            std::fill(involved.begin(), involved.end(), 0);
            initiators.clear();
            pairs.clear();

            for (std::size_t i = 0; i < n; ++i)
                if (unit(rng) < gate[cls[i]])
                    initiators.push_back(i);

            for (auto i : initiators) {
                const auto u = cls[i];
                const double x = unit(rng);
                const auto &cum = cumulative[u];
                std::size_t v = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), x) - cum.begin());
                // guard against x landing on the rounding tail of the last bucket
                while (v >= k || members[v].size() - (v == u ? 1 : 0) == 0)
                    v = v >= k ? k - 1 : v - 1;
                const auto &pool = members[v];
                std::size_t j;
                if (v == u) {
                    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 2);
                    std::size_t r = pick(rng);
                    if (r >= position[i])
                        ++r;
                    j = pool[r];
                } else {
                    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
                    j = pool[pick(rng)];
                }
                partner[i] = static_cast<std::int64_t>(j);
            }

            for (auto i : initiators) {
                const auto j = static_cast<std::size_t>(partner[i]);
                if (partner[j] == static_cast<std::int64_t>(i) && j < i)
                    continue; // mutual pick, already recorded from j
                pairs.emplace_back(i, j);
                ++involved[i];
                ++involved[j];
            }

            for (const auto &[i, j] : pairs) {
                if (involved[i] != 1 || involved[j] != 1)
                    continue;
                const auto outcomes = model.kappa.joint(states[i], states[j]);
                if (outcomes.empty())
                    continue;
                const double x = unit(rng);
                double acc = 0.0;
                const auto *chosen = &outcomes.back();
                for (const auto &o : outcomes) {
                    acc += o.probability;
                    if (x < acc) {
                        chosen = &o;
                        break;
                    }
                }
                states[i] = chosen->a;
                states[j] = chosen->b;
            }

            ++week_index;
            run.snapshots.push_back(empirical_occupancy(space, states, week_index));
        }
    }
    return run;
}

Comparison compare_to_meanfield(std::span<const OccupancyVector> oracle, std::span<const OccupancyVector> meanfield)
{
    if (oracle.size() != meanfield.size())
        throw MismatchError("oracle has " + std::to_string(oracle.size()) + " snapshots, mean-field " +
                            std::to_string(meanfield.size()));
    Comparison cmp;
    for (std::size_t t = 0; t < oracle.size(); ++t) {
        if (oracle[t].fractions.size() != meanfield[t].fractions.size())
            throw MismatchError("snapshot state spaces differ");
        if (oracle[t].week != meanfield[t].week)
            throw MismatchError("snapshot weeks differ");
        double d = 0.0;
        for (std::size_t s = 0; s < oracle[t].fractions.size(); ++s)
            d += std::abs(oracle[t].fractions[s] - meanfield[t].fractions[s]);
        cmp.l1.push_back(d);
        cmp.max_l1 = std::max(cmp.max_l1, d);
    }
    return cmp;
}

std::vector<OccupancyVector> average_runs(std::span<const OracleRun> runs)
{
    if (runs.empty())
        throw DomainError("no runs to average");
    std::vector<OccupancyVector> mean = runs.front().snapshots;
    for (auto &snap : mean)
        std::fill(snap.fractions.begin(), snap.fractions.end(), 0.0);
    for (const auto &run : runs) {
        if (run.snapshots.size() != mean.size())
            throw MismatchError("runs have different horizons");
        for (std::size_t t = 0; t < mean.size(); ++t) {
            if (run.snapshots[t].fractions.size() != mean[t].fractions.size())
                throw MismatchError("runs have different state spaces");
            for (std::size_t s = 0; s < mean[t].fractions.size(); ++s)
                mean[t].fractions[s] += run.snapshots[t].fractions[s];
        }
    }
    const double r = static_cast<double>(runs.size());
    for (auto &snap : mean)
        for (double &f : snap.fractions)
            f /= r;
    return mean;
}

void write_oracle_runs(const std::filesystem::path &path, const StateSpace &space, std::span<const OracleRun> runs)
{
    auto out = csv::open_output(path);
    out << "seed,N,week,p,c,h,u,fraction\n";
    for (const auto &run : runs)
        for (const auto &snap : run.snapshots)
            for (StateIndex i = 0; i < snap.fractions.size(); ++i) {
                if (snap.fractions[i] == 0.0)
                    continue;
                const auto s = space.state(i);
                out << run.seed << ',' << run.agents << ',' << snap.week << ',' << s.p << ',' << s.c << ','
                    << decade_label(s.h) << ',' << s.u << ',' << csv::format_double(snap.fractions[i]) << '\n';
            }
}

} // namespace mfnet
