#pragma once

#include "mfnet/corpus.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mfnet {

// Bin ranges of the aggregated state.
inline constexpr int kMaxPublications = 12;  // p in 0..12
inline constexpr int kCoauthorCategories = 5; // c in 0..4
inline constexpr int kDecadeCount = 5;
inline constexpr int kFirstDataYear = 1971;

// Scientific-age decade of the first publication.
enum class Decade : std::uint8_t { s1970 = 0, s1980, s1990, s2000, s2010 };

// 70, 80, 90, 2000, 2010.
int decade_label(Decade h);
std::optional<Decade> decade_from_label(int label);

// 0: no coauthors, 1: 1-3, 2: 4-6, 3: 7-10, 4: more than 10.
int bin_coauthor_category(int count);

// min(count, 12).
int cap_annual_publications(int count);

// Decade of a first publication year; throws DomainError before 1971.
Decade scientific_age_bin(int first_year);

// Coauthor category of round-half-up(unique_coauthors / publications); 0 when
// there are no publications.
int relative_coauthor_count(int unique_coauthors, int publications);

enum class DispersionMetric { variance, mean_absolute_deviation };

double dispersion(std::span<const double> values, DispersionMetric metric = DispersionMetric::variance);

// True iff the dispersion strictly exceeds the arithmetic mean. A tie is not
// highly dispersed. Throws DomainError on empty input.
bool dispersion_test(std::span<const double> values, DispersionMetric metric = DispersionMetric::variance);

// Number of affiliated scientists per institution. UNKNOWN is never included.
struct ScientistDistribution {
    std::map<std::string, int> counts;

    int total() const;
};

// Authors with at least one proceedings paper and a known institution.
ScientistDistribution scientist_distribution(const EventLog &log);

using ClassId = std::uint32_t;

struct ClassInfo {
    std::string label;
    std::vector<std::string> members; // sorted institution ids
    int population = 0;               // m(u)
    bool protected_region = false;    // e.g. Dutch classes
};

// Partition of institutions into classes, enumerated in lexicographic label order.
class ClassMap {
  public:
    ClassMap() = default;

    // Sorts by label and assigns ids. Throws if a member appears twice, a
    // label repeats, or a class is empty.
    static ClassMap from_classes(std::vector<ClassInfo> classes);

    std::size_t size() const { return classes_.size(); }
    bool empty() const { return classes_.empty(); }
    const ClassInfo &info(ClassId id) const { return classes_.at(id); }
    const std::vector<ClassInfo> &classes() const { return classes_; }

    std::optional<ClassId> find_class(std::string_view institution_id) const;
    ClassId class_of(std::string_view institution_id) const; // throws ReferenceError
    int population(ClassId id) const { return classes_.at(id).population; }
    int total_population() const;

    friend bool operator==(const ClassMap &a, const ClassMap &b);

  private:
    std::vector<ClassInfo> classes_;
    std::map<std::string, ClassId, std::less<>> class_of_;
};

enum class ProtectedMode {
    isolate, // protected countries are tested as their own group, merged only within the country
    exempt,  // every protected institution stays a singleton class
};

struct AbstractionOptions {
    DispersionMetric metric = DispersionMetric::variance;
    std::set<std::string> protected_countries{"NL"};
    ProtectedMode protected_mode = ProtectedMode::isolate;
};

// Two-step (continental, then country-wide) dispersion-test merge.
ClassMap abstract_classes(const ScientistDistribution &dist,
                          const std::map<std::string, AffiliationRecord, std::less<>> &affiliations,
                          const AbstractionOptions &options = {});

// Adds the terminal UNKNOWN class (label "ZZ/UNKNOWN") when count > 0.
ClassMap with_unknown_class(const ClassMap &classes, int count);

// Class of an author via their institution.
ClassId class_of_author(const EventLog &log, const ClassMap &classes, std::string_view author_id);

// class_id,label,members,m,protected
void write_class_map(const std::filesystem::path &path, const ClassMap &classes);
ClassMap read_class_map(const std::filesystem::path &path);

} // namespace mfnet
