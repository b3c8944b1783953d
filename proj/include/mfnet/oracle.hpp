#pragma once

#include "mfnet/meanfield.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace mfnet {

// Explicit agents, one state index each.
struct AgentPopulation {
    std::vector<StateIndex> states;
    std::uint64_t seed = 0;
};

// Allocates n agents to states by largest remainder of n * fractions.
AgentPopulation make_population(const StateSpace &space, std::span<const double> fractions, std::size_t n,
                                std::uint64_t seed);

OccupancyVector empirical_occupancy(const StateSpace &space, std::span<const StateIndex> states, int week);

struct OracleRun {
    std::uint64_t seed = 0;
    std::size_t agents = 0;
    std::vector<OccupancyVector> snapshots; // one per week
};

// Per-node simulation of the same weekly dynamics the mean-field operator
// aggregates. Each week every agent initiates with its class gate, picks a
// partner class by the normalized selection row and a partner uniformly
// within that class (never itself). Both sides of an interaction move by one
// joint draw from kappa. Agents caught in more than one interaction that week
// stay put; a mutual pick counts as a single interaction. The year starts
// with the same reset as initialize_year.
OracleRun simulate_agents(const AgentPopulation &population, const InteractionModel &model, int years,
                          int weeks_per_year = 52);

struct Comparison {
    std::vector<double> l1; // per snapshot
    double max_l1 = 0.0;
};

// sum_s |oracle_s - meanfield_s| per week. Throws MismatchError when the
// horizons or state spaces differ.
Comparison compare_to_meanfield(std::span<const OccupancyVector> oracle, std::span<const OccupancyVector> meanfield);

// Week-wise average of several runs' occupancies.
std::vector<OccupancyVector> average_runs(std::span<const OracleRun> runs);

// seed,N,week,p,c,h,u,fraction
void write_oracle_runs(const std::filesystem::path &path, const StateSpace &space, std::span<const OracleRun> runs);

} // namespace mfnet
