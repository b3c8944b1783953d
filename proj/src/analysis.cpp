#include "mfnet/analysis.hpp"

#include "mfnet/csv.hpp"
#include "mfnet/error.hpp"

#include <algorithm>
#include <limits>

namespace mfnet {

namespace {

std::string optional_text(const std::optional<double> &x) { return x ? csv::format_double(*x) : "NA"; }

} // namespace

ClassReport class_report(const StateSpace &space, std::span<const double> fractions, const ClassMap &classes)
{
    if (space.class_count() != classes.size())
        throw MismatchError("state space has " + std::to_string(space.class_count()) + " classes, class map " +
                            std::to_string(classes.size()));
    if (fractions.size() != space.size())
        throw MismatchError("occupancy size does not match the state space");

    const auto k = classes.size();
    std::vector<double> mass(k, 0.0), pubs(k, 0.0), coauthors(k, 0.0);
    for (StateIndex i = 0; i < fractions.size(); ++i) {
        const double f = fractions[i];
        if (f == 0.0)
            continue;
        const auto s = space.state(i);
        mass[s.u] += f;
        pubs[s.u] += f * s.p;
        coauthors[s.u] += f * s.c;
    }
    ClassReport report;
    for (ClassId u = 0; u < k; ++u) {
        ClassSummary row;
        row.id = u;
        row.label = classes.info(u).label;
        row.protected_region = classes.info(u).protected_region;
        row.mass = mass[u];
        if (mass[u] > 0.0) {
            row.avg_publications = pubs[u] / mass[u];
            row.avg_coauthor_category = coauthors[u] / mass[u];
        }
        report.push_back(std::move(row));
    }
    return report;
}

std::vector<AgeRow> age_report(const StateSpace &space, std::span<const double> fractions,
                               const std::vector<bool> &subset)
{
    if (subset.size() != space.class_count())
        throw MismatchError("subset size differs from the class count");
    if (std::none_of(subset.begin(), subset.end(), [](bool b) { return b; }))
        throw DomainError("empty class subset");
    if (fractions.size() != space.size())
        throw MismatchError("occupancy size does not match the state space");

    std::array<double, kDecadeCount> mass{}, pubs{};
    for (StateIndex i = 0; i < fractions.size(); ++i) {
        const double f = fractions[i];
        if (f == 0.0)
            continue;
        const auto s = space.state(i);
        if (!subset[s.u])
            continue;
        mass[static_cast<int>(s.h)] += f;
        pubs[static_cast<int>(s.h)] += f * s.p;
    }
    std::vector<AgeRow> rows;
    for (int h = kDecadeCount - 1; h >= 0; --h) {
        AgeRow row{static_cast<Decade>(h), mass[h], std::nullopt};
        if (mass[h] > 0.0)
            row.avg_publications = pubs[h] / mass[h];
        rows.push_back(row);
    }
    return rows;
}

std::vector<TriadRow> triad_report(const ContactMatrix &contact, const std::vector<bool> &subset)
{
    const auto k = contact.class_count;
    if (k == 0)
        throw DomainError("empty contact matrix");
    if (!subset.empty() && subset.size() != k)
        throw MismatchError("subset size differs from the class count");
    contact.validate();

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (ClassId a = 0; a < k; ++a)
        for (ClassId b = 0; b < k; ++b)
            if (a != b) {
                const double w = contact.weight(a, b);
                lo = std::min(lo, w);
                hi = std::max(hi, w);
            }
    std::vector<double> norm(k * k, 0.0);
    for (ClassId a = 0; a < k; ++a)
        for (ClassId b = 0; b < k; ++b) {
            if (a == b)
                continue;
            if (hi > lo)
                norm[a * k + b] = (contact.weight(a, b) - lo) / (hi - lo);
            else
                norm[a * k + b] = hi > 0.0 ? 1.0 : 0.0;
        }

    auto in = [&](ClassId x) { return subset.empty() || subset[x]; };
    std::vector<TriadRow> rows;
    for (double theta : kTriadThresholds) {
        TriadRow row;
        row.threshold = theta;
        double sum = 0.0;
        for (ClassId a = 0; a < k; ++a) {
            if (!in(a))
                continue;
            for (ClassId b = 0; b < k; ++b) {
                if (b == a || !in(b) || norm[a * k + b] < theta)
                    continue;
                for (ClassId c = 0; c < k; ++c) {
                    if (c == a || c == b || !in(c))
                        continue;
                    if (std::min(norm[a * k + b], norm[b * k + c]) >= theta) {
                        sum += norm[a * k + c];
                        ++row.triples;
                    }
                }
            }
        }
        if (row.triples > 0)
            row.mean_contact = sum / static_cast<double>(row.triples);
        rows.push_back(row);
    }
    const auto base = rows.front().mean_contact;
    for (auto &row : rows)
        if (row.mean_contact && base && *base > 0.0)
            row.relative = *row.mean_contact / *base;
    return rows;
}

std::vector<BaselineDifference> baseline_comparison(const ClassReport &estimated, const ClassReport &uniform)
{
    if (estimated.size() != uniform.size())
        throw MismatchError("reports cover different numbers of classes");
    std::vector<BaselineDifference> out;
    for (std::size_t i = 0; i < estimated.size(); ++i) {
        const auto &e = estimated[i];
        const auto &u = uniform[i];
        if (e.id != u.id || e.label != u.label)
            throw MismatchError("reports disagree on class " + std::to_string(i));
        BaselineDifference d{e.id, e.label, e.protected_region, std::nullopt};
        if (e.avg_publications && u.avg_publications)
            d.difference = *e.avg_publications - *u.avg_publications;
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<bool> class_subset(const ClassMap &classes, bool protected_only)
{
    std::vector<bool> subset(classes.size(), true);
    if (protected_only)
        for (ClassId u = 0; u < classes.size(); ++u)
            subset[u] = classes.info(u).protected_region;
    return subset;
}

void write_class_report(const std::filesystem::path &path, const ClassReport &meanfield, const ClassReport *observed)
{
    if (observed && observed->size() != meanfield.size())
        throw MismatchError("observed and mean-field reports differ in size");
    auto out = csv::open_output(path);
    if (observed)
        out << "# observed averages divide by the whole class; papers of coauthors-of-coauthors are missing, so "
               "they undercount\n";
    out << "class_id,label,protected,mass,avg_pubs,avg_coauthor";
    if (observed)
        out << ",observed_avg_pubs,observed_avg_coauthor";
    out << '\n';
    for (std::size_t i = 0; i < meanfield.size(); ++i) {
        const auto &r = meanfield[i];
        std::vector<std::string> fields{std::to_string(r.id), r.label, r.protected_region ? "1" : "0",
                                        csv::format_double(r.mass), optional_text(r.avg_publications),
                                        optional_text(r.avg_coauthor_category)};
        if (observed) {
            fields.push_back(optional_text((*observed)[i].avg_publications));
            fields.push_back(optional_text((*observed)[i].avg_coauthor_category));
        }
        out << csv::join(fields) << '\n';
    }
}

void write_age_report(const std::filesystem::path &path, const std::vector<AgeRow> &rows)
{
    auto out = csv::open_output(path);
    out << "h,mass,avg_pubs\n";
    for (const auto &r : rows)
        out << decade_label(r.h) << ',' << csv::format_double(r.mass) << ',' << optional_text(r.avg_publications)
            << '\n';
}

void write_triad_report(const std::filesystem::path &path, const std::vector<TriadRow> &rows)
{
    auto out = csv::open_output(path);
    out << "# contact scale: min-max normalized over ordered pairs of distinct classes\n";
    out << "threshold,triples,mean_contact,relative\n";
    for (const auto &r : rows)
        out << csv::format_double(r.threshold) << ',' << r.triples << ',' << optional_text(r.mean_contact) << ','
            << optional_text(r.relative) << '\n';
}

void write_baseline_diff(const std::filesystem::path &path, const std::vector<BaselineDifference> &rows)
{
    auto out = csv::open_output(path);
    out << "class_id,label,region,difference\n";
    for (const auto &r : rows)
        out << csv::join({std::to_string(r.id), r.label, r.protected_region ? "dutch" : "foreign",
                          optional_text(r.difference)})
            << '\n';
}

} // namespace mfnet
