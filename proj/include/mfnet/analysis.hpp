#pragma once

#include "mfnet/abstraction.hpp"
#include "mfnet/estimation.hpp"
#include "mfnet/meanfield.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mfnet {

struct ClassSummary {
    ClassId id = 0;
    std::string label;
    bool protected_region = false;
    double mass = 0.0;
    std::optional<double> avg_publications; // undefined for a zero-mass class
    std::optional<double> avg_coauthor_category;
};

using ClassReport = std::vector<ClassSummary>;

// Mass-weighted mean p and c per class, in class id (lexicographic label) order.
ClassReport class_report(const StateSpace &space, std::span<const double> fractions, const ClassMap &classes);

struct AgeRow {
    Decade h;
    double mass = 0.0;
    std::optional<double> avg_publications;
};

// Mean p per decade over the classes flagged in `subset` (size = class
// count). Rows run from the 2010s down to the 1970s. Throws DomainError on an
// empty subset.
std::vector<AgeRow> age_report(const StateSpace &space, std::span<const double> fractions,
                               const std::vector<bool> &subset);

inline constexpr std::array<double, 6> kTriadThresholds{0.0, 1.0 / 5.0, 2.0 / 5.0, 3.0 / 5.0, 4.0 / 5.0, 1.0};

struct TriadRow {
    double threshold = 0.0;
    std::size_t triples = 0;
    std::optional<double> mean_contact; // normalized scale
    std::optional<double> relative;     // mean_contact / mean_contact at threshold 0
};

// Contact weights between distinct classes are min-max normalized to [0, 1]
// (absent pairs count as 0). For each threshold, averages n(a, c) over ordered
// triples of distinct classes a, b, c inside `subset` with
// min(n(a, b), n(b, c)) >= threshold. An empty subset means all classes.
std::vector<TriadRow> triad_report(const ContactMatrix &contact, const std::vector<bool> &subset = {});

struct BaselineDifference {
    ClassId id = 0;
    std::string label;
    bool protected_region = false;
    std::optional<double> difference; // estimated minus uniform average publications
};

// Throws MismatchError if the reports cover different classes.
std::vector<BaselineDifference> baseline_comparison(const ClassReport &estimated, const ClassReport &uniform);

// Flags for the protected classes (Dutch by default) or all classes.
std::vector<bool> class_subset(const ClassMap &classes, bool protected_only);

void write_class_report(const std::filesystem::path &path, const ClassReport &meanfield, const ClassReport *observed);
void write_age_report(const std::filesystem::path &path, const std::vector<AgeRow> &rows);
void write_triad_report(const std::filesystem::path &path, const std::vector<TriadRow> &rows);
void write_baseline_diff(const std::filesystem::path &path, const std::vector<BaselineDifference> &rows);

} // namespace mfnet
