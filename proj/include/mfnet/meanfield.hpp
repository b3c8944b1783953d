#pragma once

#include "mfnet/estimation.hpp"
#include "mfnet/state.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace mfnet {

struct OccupancyVector {
    int week = 0;
    std::vector<double> fractions;
};

// Throws DomainError on negative entries or a total off 1 by more than 1e-9.
void check_occupancy(const OccupancyVector &delta);

// Per-class mass sum_{p,c,h} delta(p,c,h,u).
std::vector<double> class_masses(const StateSpace &space, std::span<const double> fractions);

// Joint successor pairs of the communication distribution, indexed by state.
class CompiledKappa {
  public:
    struct Outcome {
        StateIndex a;
        StateIndex b;
        double probability;
    };
    struct Key {
        StateIndex a;
        StateIndex b;
        std::uint32_t offset;
        std::uint32_t count;
    };

    CompiledKappa() = default;
    CompiledKappa(const StateSpace &space, const KappaTable &table);

    // Empty when the pair was never observed (identity applies).
    std::span<const Outcome> joint(StateIndex a, StateIndex b) const;

    // Keys with `a` in the first slot, ordered by b.
    std::span<const Key> with_first(StateIndex a) const;
    // Keys with `b` in the second slot, ordered by a.
    std::span<const Key> with_second(StateIndex b) const;

    std::span<const Outcome> outcomes(const Key &key) const { return {outcomes_.data() + key.offset, key.count}; }
    std::size_t key_count() const { return keys_.size(); }

  private:
    std::vector<Outcome> outcomes_;
    std::vector<Key> keys_;               // sorted by (a, b)
    std::vector<Key> keys_by_second_;     // sorted by (b, a)
    std::vector<std::uint32_t> first_begin_;  // size()+1 offsets into keys_
    std::vector<std::uint32_t> second_begin_; // size()+1 offsets into keys_by_second_
};

// Everything the weekly dynamics need: initiation gate per class, partner
// class selection weights, and the compiled communication distribution.
struct InteractionModel {
    StateSpace space;
    std::vector<double> gate;                   // weekly probability that a node initiates
    std::vector<std::vector<double>> selection; // [u][v] non-negative, normalized when used
    CompiledKappa kappa;
};

struct ModelOptions {
    WeeklyRule weekly_rule = WeeklyRule::geometric;
    int weeks_per_year = 52;
};

// Direct construction for hand-built instances.
InteractionModel make_model(const StateSpace &space, std::vector<double> weekly_gate,
                            std::vector<std::vector<double>> selection, const KappaTable &kappa);

// Gate of class u: annual_to_weekly(1 - exp(-R_u)) with R_u the row sum of
// the contact weights (expected interactions per node and year). Selection
// weights are the contact rows.
InteractionModel compile_model(const SmoothedModel &model, const ClassMap &classes, const ModelOptions &options = {});

// Pairing rates that the operator derives from the current occupancy.
struct PairingRates {
    std::vector<double> mass;                     // per class
    std::vector<double> gate;                     // effective gate (0 if no partner class available)
    std::vector<std::vector<double>> selection;   // row-normalized over classes with positive mass
    std::vector<double> chosen_rate;              // expected times a node is picked as partner per week
};

PairingRates pairing_rates(const InteractionModel &model, std::span<const double> fractions);

// Column-stochastic weekly operator M, stored by columns (sparse) or densely.
class TransitionOperator {
  public:
    struct Entry {
        StateIndex row;
        double value;
    };

    static TransitionOperator sparse(std::vector<std::vector<Entry>> columns);
    static TransitionOperator dense(std::size_t n, std::vector<double> column_major);

    std::size_t size() const { return n_; }
    bool is_dense() const { return dense_; }
    double at(StateIndex row, StateIndex col) const;
    double column_sum(StateIndex col) const;
    bool has_negative_entry() const;

    // y = M x
    std::vector<double> apply(std::span<const double> x) const;

  private:
    std::size_t n_ = 0;
    bool dense_ = false;
    std::vector<std::vector<Entry>> columns_;
    std::vector<double> values_; // column-major when dense
};

struct OperatorOptions {
    std::size_t dense_threshold = 512; // dense storage when the state space is at most this large
};

// Weekly operator for the current occupancy. A node in state A (class u)
//  - initiates with the gate probability, picks a partner class v by the
//    normalized selection row and a partner state B from delta restricted to
//    v, and moves by the first slot of kappa(A, B);
//  - or is picked as partner by an initiator in state B and moves by the
//    second slot of kappa(B, A);
//  - otherwise stays (idle). A node involved in more than one interaction in
//    the same week stays as well (collision), which in the large-population
//    limit gives the factors exp(-r_u) with r_u the partner-pick rate.
TransitionOperator build_operator(const OccupancyVector &delta, const InteractionModel &model,
                                  const OperatorOptions &options = {});

// delta(t + 1) = M delta(t). Throws MismatchError on a size mismatch.
OccupancyVector step(const OccupancyVector &delta, const TransitionOperator &m);

// Moves the mass of every (h, u) block to (0, 0, h, u).
OccupancyVector initialize_year(const StateSpace &space, const OccupancyVector &delta);

enum class SnapshotCadence { weekly, yearly };

struct TrajectoryOptions {
    int years = 1;
    int weeks_per_year = 52;
    SnapshotCadence cadence = SnapshotCadence::weekly;
    OperatorOptions operator_options;
};

// For every year: initialize_year, then weekly build_operator + step.
// Snapshots are taken after each week (or after each year's last week).
std::vector<OccupancyVector> run_trajectory(const OccupancyVector &initial, const InteractionModel &model,
                                            const TrajectoryOptions &options);

// week,p,c,h,u,fraction for every non-zero fraction.
void write_trajectory(const std::filesystem::path &path, const StateSpace &space,
                      std::span<const OccupancyVector> snapshots);
std::vector<OccupancyVector> read_trajectory(const std::filesystem::path &path, const StateSpace &space);

} // namespace mfnet
