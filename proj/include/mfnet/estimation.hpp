#pragma once

#include "mfnet/abstraction.hpp"
#include "mfnet/corpus.hpp"
#include "mfnet/state.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace mfnet {

// Non-negative interaction weight per ordered class pair. Weights are per
// node of the source class (annual rate of contacting the target class).
struct ContactMatrix {
    std::optional<int> year; // nullopt for year-independent (smoothed) tables
    std::size_t class_count = 0;
    std::map<std::pair<ClassId, ClassId>, double> weights; // absent pair means 0

    double weight(ClassId from, ClassId to) const;
    double row_sum(ClassId from) const;
    double total() const;
    void validate() const;
};

struct KappaSuccessor {
    double probability = 0.0;
    NodeState a;
    NodeState b;
};

struct KappaEntry {
    double observations = 0.0; // number of observed pair transitions
    std::vector<KappaSuccessor> successors;
};

using StatePair = std::pair<NodeState, NodeState>;

// Communication distribution: paired successor states per pair of states.
struct KappaTable {
    std::optional<int> year;
    std::map<StatePair, KappaEntry> entries;

    // Probabilities non-negative and summing to 1 within 1e-12; successors keep
    // (h, u) of their predecessor and stay inside the bins.
    void validate() const;
};

// 1 / (m(u_a) * c_i). Throws DomainError if either factor is zero.
double pair_probability(int author_count, int class_population);

// Sum over the year's papers and over ordered pairs of distinct coauthors.
ContactMatrix compute_contact(const EventLog &log, const ClassMap &classes, int year);

// Observed paired transitions. Authors start the year at (0, 0) and papers are
// replayed in ascending paper_id order; each ordered coauthor pair records the
// states before and after the paper.
KappaTable compute_kappa(const EventLog &log, const ClassMap &classes, int year);

// Binned state of an author after the given yearly profile.
NodeState binned_state(const AnnualProfile &profile, Decade h, ClassId u);

// Authors with a proceedings paper and a class, each at its binned state for
// `year`, as fractions of the whole population.
std::vector<double> observed_occupancy(const EventLog &log, const ClassMap &classes, const StateSpace &space,
                                       int year);

enum class WeeklyRule {
    geometric, // 1 - (1 - p)^(1/weeks)
    linear,    // p / weeks
};

double annual_to_weekly(double p_year, WeeklyRule rule = WeeklyRule::geometric, int weeks_per_year = 52);

// Idle and collision distributions. Both are the identity here.
struct DecayModel {
    static std::vector<std::pair<double, NodeState>> idle(const NodeState &s) { return {{1.0, s}}; }
    static std::vector<std::pair<double, NodeState>> collision(const NodeState &s) { return {{1.0, s}}; }
};

enum class SmoothingMethod { hmm, mean };

struct HmmConfig {
    SmoothingMethod method = SmoothingMethod::hmm;
    int hidden_states = 2;
    int max_iterations = 200;
    std::uint64_t seed = 1;
    double tolerance = 1e-8;
    double epsilon = 1e-6; // additive smoothing of the fallback path
};

struct YearTables {
    ContactMatrix contact;
    KappaTable kappa;
};

struct SmoothedModel {
    ContactMatrix contact;
    KappaTable kappa;
    HmmConfig config;
    bool fallback_used = false;
};

// Year-independent tables. Fits a histogram HMM over the yearly tables and
// takes its stationary emission mixture; falls back to mean_fallback with a
// single training year, method == mean, or no EM convergence.
SmoothedModel estimate_smoothed(std::span<const YearTables> yearly, const HmmConfig &config = {});

// Arithmetic mean of the yearly tables plus epsilon on every observed entry.
SmoothedModel mean_fallback(std::span<const YearTables> yearly, const HmmConfig &config = {});

// Pair weights m(a) m(b) / N^2: every scientist pair equally likely.
ContactMatrix uniform_baseline(const ClassMap &classes);

// Converts pair weights into per-node rates with the same total number of
// interactions per year as `reference`, so the baseline can replace the
// estimated matrix in the simulation.
ContactMatrix rescale_like(const ContactMatrix &pair_weights, const ContactMatrix &reference,
                           const ClassMap &classes);

} // namespace mfnet
