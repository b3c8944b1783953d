#include "mfnet/abstraction.hpp"

#include "mfnet/csv.hpp"
#include "mfnet/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace mfnet {

int decade_label(Decade h)
{
    switch (h) {
    case Decade::s1970:
        return 70;
    case Decade::s1980:
        return 80;
    case Decade::s1990:
        return 90;
    case Decade::s2000:
        return 2000;
    case Decade::s2010:
        return 2010;
    }
    return 0;
}

std::optional<Decade> decade_from_label(int label)
{
    for (int i = 0; i < kDecadeCount; ++i)
        if (decade_label(static_cast<Decade>(i)) == label)
            return static_cast<Decade>(i);
    return std::nullopt;
}

int bin_coauthor_category(int count)
{
    if (count < 0)
        throw DomainError("negative coauthor count");
    if (count == 0)
        return 0;
    if (count <= 3)
        return 1;
    if (count <= 6)
        return 2;
    if (count <= 10)
        return 3;
    return 4;
}

int cap_annual_publications(int count)
{
    if (count < 0)
        throw DomainError("negative publication count");
    return std::min(count, kMaxPublications);
}

Decade scientific_age_bin(int first_year)
{
    if (first_year < kFirstDataYear)
        throw DomainError("first publication year " + std::to_string(first_year) + " precedes 1971");
    if (first_year < 1980)
        return Decade::s1970;
    if (first_year < 1990)
        return Decade::s1980;
    if (first_year < 2000)
        return Decade::s1990;
    if (first_year < 2010)
        return Decade::s2000;
    return Decade::s2010;
}

int relative_coauthor_count(int unique_coauthors, int publications)
{
    if (publications < 0 || unique_coauthors < 0)
        throw DomainError("negative count");
    if (publications == 0)
        return 0;
    // round half up in integer arithmetic
    const int rounded = (2 * unique_coauthors + publications) / (2 * publications);
    return bin_coauthor_category(rounded);
}

double dispersion(std::span<const double> values, DispersionMetric metric)
{
    if (values.empty())
        throw DomainError("dispersion of an empty sample");
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (metric == DispersionMetric::mean_absolute_deviation) {
        double sum = 0.0;
        for (double v : values)
            sum += std::abs(v - mean);
        return sum / n;
    }
    if (values.size() < 2)
        return 0.0;
    double sum = 0.0;
    for (double v : values)
        sum += (v - mean) * (v - mean);
    return sum / (n - 1.0);
}

bool dispersion_test(std::span<const double> values, DispersionMetric metric)
{
    if (values.empty())
        throw DomainError("dispersion test on an empty sample");
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    return dispersion(values, metric) > mean;
}

int ScientistDistribution::total() const
{
    int sum = 0;
    for (const auto &[id, n] : counts)
        sum += n;
    return sum;
}

ScientistDistribution scientist_distribution(const EventLog &log)
{
    ScientistDistribution dist;
    for (const auto &[id, author] : log.authors()) {
        if (author.affiliation_id == kUnknownInstitution || !log.first_year(id))
            continue;
        ++dist.counts[author.affiliation_id];
    }
    return dist;
}

ClassMap ClassMap::from_classes(std::vector<ClassInfo> classes)
{
    std::sort(classes.begin(), classes.end(),
              [](const ClassInfo &a, const ClassInfo &b) { return a.label < b.label; });
    ClassMap map;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        auto &info = classes[i];
        if (info.members.empty())
            throw Error("class " + info.label + " has no members");
        if (info.population <= 0)
            throw Error("class " + info.label + " has no population");
        if (i > 0 && classes[i - 1].label == info.label)
            throw Error("duplicate class label " + info.label);
        std::sort(info.members.begin(), info.members.end());
        for (const auto &m : info.members)
            if (!map.class_of_.emplace(m, static_cast<ClassId>(i)).second)
                throw Error("institution " + m + " assigned to two classes");
    }
    map.classes_ = std::move(classes);
    return map;
}

std::optional<ClassId> ClassMap::find_class(std::string_view institution_id) const
{
    auto it = class_of_.find(institution_id);
    if (it == class_of_.end())
        return std::nullopt;
    return it->second;
}

ClassId ClassMap::class_of(std::string_view institution_id) const
{
    auto id = find_class(institution_id);
    if (!id)
        throw ReferenceError("institution " + std::string(institution_id) + " belongs to no class");
    return *id;
}

int ClassMap::total_population() const
{
    int sum = 0;
    for (const auto &c : classes_)
        sum += c.population;
    return sum;
}

bool operator==(const ClassMap &a, const ClassMap &b)
{
    if (a.classes_.size() != b.classes_.size())
        return false;
    for (std::size_t i = 0; i < a.classes_.size(); ++i) {
        const auto &x = a.classes_[i];
        const auto &y = b.classes_[i];
        if (x.label != y.label || x.members != y.members || x.population != y.population ||
            x.protected_region != y.protected_region)
            return false;
    }
    return true;
}

namespace {

struct Institution {
    std::string id;
    int count;
    std::string country;
};

class ClassBuilder {
  public:
    explicit ClassBuilder(bool protected_region) : protected_(protected_region) {}

    void singleton(const Institution &inst, std::vector<ClassInfo> &out) const
    {
        out.push_back(ClassInfo{inst.country + "/" + inst.id, {inst.id}, inst.count, protected_});
    }

    // One class for the group; a one-member group keeps its singleton label.
    void merged(const std::string &label, const std::vector<const Institution *> &group,
                std::vector<ClassInfo> &out) const
    {
        if (group.empty())
            return;
        if (group.size() == 1) {
            singleton(*group.front(), out);
            return;
        }
        ClassInfo info{label, {}, 0, protected_};
        for (const auto *inst : group) {
            info.members.push_back(inst->id);
            info.population += inst->count;
        }
        out.push_back(std::move(info));
    }

  private:
    bool protected_;
};

std::vector<double> counts_of(const std::vector<const Institution *> &group)
{
    std::vector<double> values;
    values.reserve(group.size());
    for (const auto *inst : group)
        values.push_back(inst->count);
    return values;
}

// Country-level rule: a homogeneous country collapses into one class; a
// dispersed one merges only institutions below the global mean.
void split_country(const std::string &merged_label, const std::vector<const Institution *> &group,
                   double global_mean, const ClassBuilder &builder, DispersionMetric metric,
                   std::vector<ClassInfo> &out)
{
    if (!dispersion_test(counts_of(group), metric)) {
        builder.merged(merged_label, group, out);
        return;
    }
    std::vector<const Institution *> below;
    for (const auto *inst : group) {
        if (inst->count < global_mean)
            below.push_back(inst);
        else
            builder.singleton(*inst, out);
    }
    builder.merged(merged_label, below, out);
}

} // namespace

ClassMap abstract_classes(const ScientistDistribution &dist,
                          const std::map<std::string, AffiliationRecord, std::less<>> &affiliations,
                          const AbstractionOptions &options)
{
    if (dist.counts.empty())
        throw DomainError("empty scientist distribution");

    std::vector<Institution> institutions;
    for (const auto &[id, count] : dist.counts) {
        if (id == kUnknownInstitution)
            throw DomainError("UNKNOWN cannot take part in the class abstraction");
        if (count <= 0)
            throw DomainError("institution " + id + " has a non-positive count");
        auto it = affiliations.find(id);
        if (it == affiliations.end() || it->second.continent == Continent::unknown)
            throw ReferenceError("institution " + id + " lacks geographic data");
        institutions.push_back(Institution{id, count, it->second.country_code});
    }
    const double global_mean = static_cast<double>(dist.total()) / static_cast<double>(institutions.size());

    std::map<std::string, std::vector<const Institution *>> protected_by_country;
    std::map<Continent, std::vector<const Institution *>> by_continent;
    for (const auto &inst : institutions) {
        if (options.protected_countries.contains(inst.country))
            protected_by_country[inst.country].push_back(&inst);
        else
            by_continent[affiliations.find(inst.id)->second.continent].push_back(&inst);
    }

    std::vector<ClassInfo> classes;

    const ClassBuilder protected_builder(true);
    for (const auto &[country, group] : protected_by_country) {
        if (options.protected_mode == ProtectedMode::exempt) {
            for (const auto *inst : group)
                protected_builder.singleton(*inst, classes);
        } else {
            split_country(country + "/*", group, global_mean, protected_builder, options.metric, classes);
        }
    }

    const ClassBuilder builder(false);
    for (const auto &[continent, group] : by_continent) {
        if (!dispersion_test(counts_of(group), options.metric)) {
            builder.merged("continent/" + std::string(continent_code(continent)), group, classes);
            continue;
        }
        std::map<std::string, std::vector<const Institution *>> by_country;
        for (const auto *inst : group)
            by_country[inst->country].push_back(inst);
        for (const auto &[country, members] : by_country) {
            // a transcontinental country may be merged once per continent
            auto label = country + "/*";
            if (continents_of(country).size() > 1)
                label += "@" + std::string(continent_code(continent));
            split_country(label, members, global_mean, builder, options.metric, classes);
        }
    }

    return ClassMap::from_classes(std::move(classes));
}

ClassMap with_unknown_class(const ClassMap &classes, int count)
{
    if (count <= 0)
        return classes;
    if (classes.find_class(kUnknownInstitution))
        throw Error("class map already contains UNKNOWN");
    auto all = classes.classes();
    all.push_back(ClassInfo{std::string(kUnknownCountry) + "/" + std::string(kUnknownInstitution),
                            {std::string(kUnknownInstitution)},
                            count,
                            false});
    return ClassMap::from_classes(std::move(all));
}

ClassId class_of_author(const EventLog &log, const ClassMap &classes, std::string_view author_id)
{
    return classes.class_of(log.author(author_id).affiliation_id);
}

void write_class_map(const std::filesystem::path &path, const ClassMap &classes)
{
    auto out = csv::open_output(path);
    out << "class_id,label,members,m,protected\n";
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const auto &info = classes.info(static_cast<ClassId>(i));
        std::string members;
        for (std::size_t k = 0; k < info.members.size(); ++k) {
            if (k)
                members.push_back(';');
            members += info.members[k];
        }
        out << csv::join({std::to_string(i), info.label, members, std::to_string(info.population),
                          info.protected_region ? "1" : "0"})
            << '\n';
    }
}

ClassMap read_class_map(const std::filesystem::path &path)
{
    const auto table = csv::Table::read(path);
    const auto c_id = table.column("class_id");
    const auto c_label = table.column("label");
    const auto c_members = table.column("members");
    const auto c_m = table.column("m");
    const auto c_protected = table.column("protected");
    std::vector<ClassInfo> classes;
    for (const auto &row : table.rows()) {
        ClassInfo info;
        info.label = row.fields[c_label];
        const auto &members = row.fields[c_members];
        std::size_t start = 0;
        while (start <= members.size()) {
            auto end = members.find(';', start);
            auto piece = members.substr(start, end == std::string::npos ? std::string::npos : end - start);
            if (!piece.empty())
                info.members.push_back(piece);
            if (end == std::string::npos)
                break;
            start = end + 1;
        }
        const auto &m = row.fields[c_m];
        auto [ptr, ec] = std::from_chars(m.data(), m.data() + m.size(), info.population);
        if (ec != std::errc() || ptr != m.data() + m.size() || info.population <= 0)
            throw ParseError(table.source(), row.line, "invalid population '" + m + "'");
        info.protected_region = row.fields[c_protected] == "1";
        if (row.fields[c_id] != std::to_string(classes.size()))
            throw ParseError(table.source(), row.line, "class ids must be consecutive from 0");
        classes.push_back(std::move(info));
    }
    auto map = ClassMap::from_classes(classes);
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (map.info(static_cast<ClassId>(i)).label != classes[i].label)
            throw ParseError(table.source(), 1, "class labels are not in lexicographic order");
    return map;
}

} // namespace mfnet
