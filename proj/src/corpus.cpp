#include "mfnet/corpus.hpp"

#include "mfnet/csv.hpp"
#include "mfnet/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

namespace mfnet {

namespace {

bool publication_order(const PublicationRecord &a, const PublicationRecord &b)
{
    if (a.year != b.year)
        return a.year < b.year;
    return a.paper_id < b.paper_id;
}

int parse_int(const std::string &text, const std::string &source, std::size_t line, std::string_view what)
{
    int value = 0;
    const char *first = text.data();
    const char *last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw ParseError(source, line, "invalid " + std::string(what) + " '" + text + "'");
    return value;
}

double parse_double(const std::string &text, const std::string &source, std::size_t line, std::string_view what)
{
    double value = 0.0;
    const char *first = text.data();
    const char *last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value))
        throw ParseError(source, line, "invalid " + std::string(what) + " '" + text + "'");
    return value;
}

std::vector<std::string> split_ids(std::string_view text)
{
    std::vector<std::string> ids;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find(';', start);
        auto piece = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        while (!piece.empty() && piece.front() == ' ')
            piece.remove_prefix(1);
        while (!piece.empty() && piece.back() == ' ')
            piece.remove_suffix(1);
        if (!piece.empty())
            ids.emplace_back(piece);
        if (end == std::string_view::npos)
            break;
        start = end + 1;
    }
    return ids;
}

AffiliationRecord unknown_affiliation()
{
    return AffiliationRecord{std::string(kUnknownInstitution), "Unknown institution",
                             std::string(kUnknownCountry), Continent::unknown, 0.0, 0.0};
}

std::vector<PublicationRecord> read_publications_jsonl(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    std::vector<PublicationRecord> rows;
    std::string line;
    std::size_t number = 0;
    const std::string source = path.string();
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            const auto j = nlohmann::json::parse(line);
            PublicationRecord rec;
            rec.paper_id = j.at("paper_id").is_string() ? j.at("paper_id").get<std::string>()
                                                         : j.at("paper_id").dump();
            rec.year = j.at("year").get<int>();
            rec.venue_kind = parse_venue_kind(j.at("venue_kind").get<std::string>());
            const auto &ids = j.at("author_ids");
            if (ids.is_string())
                rec.author_ids = split_ids(ids.get<std::string>());
            else
                rec.author_ids = ids.get<std::vector<std::string>>();
            rows.push_back(std::move(rec));
        } catch (const nlohmann::json::exception &e) {
            throw ParseError(source, number, e.what());
        }
    }
    return rows;
}

} // namespace

VenueKind parse_venue_kind(std::string_view text)
{
    std::string lower;
    for (char ch : text)
        if (ch != '@')
            lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    if (lower == "inproceedings" || lower == "proceedings")
        return VenueKind::proceedings;
    return VenueKind::other;
}

EventLog::EventLog(std::vector<PublicationRecord> publications, std::vector<AuthorRecord> authors,
                   std::vector<AffiliationRecord> affiliations, YearWindow window)
    : window_(window)
{
    if (window.first > window.last)
        throw DomainError("empty data window");

    for (auto &aff : affiliations) {
        if (aff.institution_id.empty())
            throw Error("affiliation with empty institution_id");
        if (!(aff.latitude >= -90.0 && aff.latitude <= 90.0) ||
            !(aff.longitude >= -180.0 && aff.longitude <= 180.0))
            throw DomainError("institution " + aff.institution_id + ": coordinates out of range");
        if (!country_on_continent(aff.country_code, aff.continent))
            throw Error("institution " + aff.institution_id + ": country " + aff.country_code +
                        " is not on continent " + std::string(continent_code(aff.continent)));
        const std::string id = aff.institution_id;
        if (!affiliations_.emplace(id, std::move(aff)).second)
            throw Error("duplicate institution_id " + id);
    }
    affiliations_.try_emplace(std::string(kUnknownInstitution), unknown_affiliation());

    for (auto &author : authors) {
        if (author.author_id.empty())
            throw Error("author with empty author_id");
        if (author.affiliation_id.empty())
            author.affiliation_id = std::string(kUnknownInstitution);
        if (!affiliations_.contains(author.affiliation_id))
            throw ReferenceError("author " + author.author_id + " references unknown institution " +
                                 author.affiliation_id);
        const std::string id = author.author_id;
        if (!authors_.emplace(id, std::move(author)).second)
            throw Error("author " + id + " listed more than once");
    }

    std::set<std::string, std::less<>> paper_ids;
    for (const auto &pub : publications) {
        if (!paper_ids.insert(pub.paper_id).second)
            throw Error("duplicate paper_id " + pub.paper_id);
        if (pub.author_ids.empty())
            throw Error("paper " + pub.paper_id + " has no authors");
        if (pub.year < window.first || pub.year > window.last)
            throw DomainError("paper " + pub.paper_id + ": year " + std::to_string(pub.year) +
                              " outside data window");
        std::set<std::string_view> seen;
        for (const auto &id : pub.author_ids) {
            if (!seen.insert(id).second)
                throw Error("paper " + pub.paper_id + " lists author " + id + " twice");
            if (!authors_.contains(id))
                throw ReferenceError("paper " + pub.paper_id + " references unknown author " + id);
        }
    }

    all_ = std::move(publications);
    std::sort(all_.begin(), all_.end(), publication_order);
    for (const auto &pub : all_)
        if (pub.venue_kind == VenueKind::proceedings)
            proceedings_.push_back(pub);

    for (std::size_t i = 0; i < proceedings_.size(); ++i) {
        by_year_[proceedings_[i].year].push_back(i);
        for (const auto &id : proceedings_[i].author_ids)
            by_author_[id].push_back(i);
    }
}

std::vector<const PublicationRecord *> EventLog::publications_in(int year) const
{
    std::vector<const PublicationRecord *> out;
    if (auto it = by_year_.find(year); it != by_year_.end())
        for (auto i : it->second)
            out.push_back(&proceedings_[i]);
    return out;
}

std::vector<const PublicationRecord *> EventLog::publications_of(std::string_view author_id) const
{
    std::vector<const PublicationRecord *> out;
    if (auto it = by_author_.find(author_id); it != by_author_.end())
        for (auto i : it->second)
            out.push_back(&proceedings_[i]);
    return out;
}

bool EventLog::has_author(std::string_view author_id) const
{
    return authors_.find(author_id) != authors_.end();
}

const AuthorRecord &EventLog::author(std::string_view author_id) const
{
    auto it = authors_.find(author_id);
    if (it == authors_.end())
        throw ReferenceError("unknown author " + std::string(author_id));
    return it->second;
}

const AffiliationRecord &EventLog::affiliation_of(std::string_view author_id) const
{
    return affiliations_.find(author(author_id).affiliation_id)->second;
}

std::optional<int> EventLog::first_year(std::string_view author_id) const
{
    auto it = by_author_.find(author_id);
    if (it == by_author_.end() || it->second.empty())
        return std::nullopt;
    // by_author_ indices follow the (year, paper_id) order
    return proceedings_[it->second.front()].year;
}

EventLog EventLog::proceedings_only() const
{
    std::vector<AuthorRecord> authors;
    for (const auto &[id, a] : authors_)
        authors.push_back(a);
    std::vector<AffiliationRecord> affiliations;
    for (const auto &[id, a] : affiliations_)
        affiliations.push_back(a);
    return EventLog(proceedings_, std::move(authors), std::move(affiliations), window_);
}

std::vector<PublicationRecord> read_publications(const std::filesystem::path &path)
{
    const auto ext = path.extension().string();
    if (ext == ".jsonl" || ext == ".json")
        return read_publications_jsonl(path);

    const auto table = csv::Table::read(path);
    const auto c_id = table.column("paper_id");
    const auto c_year = table.column("year");
    const auto c_venue = table.column("venue_kind");
    const auto c_authors = table.column("author_ids");
    std::vector<PublicationRecord> rows;
    for (const auto &row : table.rows()) {
        PublicationRecord rec;
        rec.paper_id = row.fields[c_id];
        if (rec.paper_id.empty())
            throw ParseError(table.source(), row.line, "empty paper_id");
        rec.year = parse_int(row.fields[c_year], table.source(), row.line, "year");
        rec.venue_kind = parse_venue_kind(row.fields[c_venue]);
        rec.author_ids = split_ids(row.fields[c_authors]);
        if (rec.author_ids.empty())
            throw ParseError(table.source(), row.line, "paper " + rec.paper_id + " has no authors");
        rows.push_back(std::move(rec));
    }
    return rows;
}

std::vector<AuthorRecord> read_authors(const std::filesystem::path &path)
{
    const auto table = csv::Table::read(path);
    const auto c_id = table.column("author_id");
    const auto c_aff = table.column("affiliation_id");
    const auto c_name = table.column("display_name");
    std::vector<AuthorRecord> rows;
    for (const auto &row : table.rows()) {
        if (row.fields[c_id].empty())
            throw ParseError(table.source(), row.line, "empty author_id");
        rows.push_back(AuthorRecord{row.fields[c_id], row.fields[c_aff], row.fields[c_name]});
    }
    return rows;
}

std::vector<AffiliationRecord> read_affiliations(const std::filesystem::path &path)
{
    const auto table = csv::Table::read(path);
    const auto c_id = table.column("institution_id");
    const auto c_label = table.column("label");
    const auto c_country = table.column("country_code");
    const auto c_continent = table.column("continent_code");
    const auto c_lat = table.column("latitude");
    const auto c_lon = table.column("longitude");
    std::vector<AffiliationRecord> rows;
    for (const auto &row : table.rows()) {
        AffiliationRecord rec;
        rec.institution_id = row.fields[c_id];
        if (rec.institution_id.empty())
            throw ParseError(table.source(), row.line, "empty institution_id");
        rec.label = row.fields[c_label];
        rec.country_code = row.fields[c_country];
        auto continent = parse_continent(row.fields[c_continent]);
        if (!continent)
            throw ParseError(table.source(), row.line, "invalid continent_code '" + row.fields[c_continent] + "'");
        rec.continent = *continent;
        rec.latitude = parse_double(row.fields[c_lat], table.source(), row.line, "latitude");
        rec.longitude = parse_double(row.fields[c_lon], table.source(), row.line, "longitude");
        if (rec.latitude < -90.0 || rec.latitude > 90.0 || rec.longitude < -180.0 || rec.longitude > 180.0)
            throw ParseError(table.source(), row.line, "coordinates out of range");
        if (continents_of(rec.country_code).empty())
            throw ParseError(table.source(), row.line, "unknown country_code '" + rec.country_code + "'");
        rows.push_back(std::move(rec));
    }
    return rows;
}

EventLog load_corpus(const std::filesystem::path &publications_path, const std::filesystem::path &authors_path,
                     const std::filesystem::path &affiliations_path, const LoadOptions &options)
{
    auto publications = read_publications(publications_path);
    if (options.drop_outside_window)
        std::erase_if(publications, [&](const PublicationRecord &p) {
            return p.year < options.window.first || p.year > options.window.last;
        });
    return EventLog(std::move(publications), read_authors(authors_path), read_affiliations(affiliations_path),
                    options.window);
}

void write_publications(const std::filesystem::path &path, const std::vector<PublicationRecord> &rows)
{
    auto out = csv::open_output(path);
    out << "paper_id,year,venue_kind,author_ids\n";
    for (const auto &r : rows) {
        std::string ids;
        for (std::size_t i = 0; i < r.author_ids.size(); ++i) {
            if (i)
                ids.push_back(';');
            ids += r.author_ids[i];
        }
        out << csv::join({r.paper_id, std::to_string(r.year),
                          r.venue_kind == VenueKind::proceedings ? "inproceedings" : "article", ids})
            << '\n';
    }
}

void write_authors(const std::filesystem::path &path, const std::vector<AuthorRecord> &rows)
{
    auto out = csv::open_output(path);
    out << "author_id,affiliation_id,display_name\n";
    for (const auto &r : rows)
        out << csv::join({r.author_id, r.affiliation_id, r.display_name}) << '\n';
}

void write_affiliations(const std::filesystem::path &path, const std::vector<AffiliationRecord> &rows)
{
    auto out = csv::open_output(path);
    out << "institution_id,label,country_code,continent_code,latitude,longitude\n";
    for (const auto &r : rows)
        out << csv::join({r.institution_id, r.label, r.country_code, std::string(continent_code(r.continent)),
                          csv::format_double(r.latitude), csv::format_double(r.longitude)})
            << '\n';
}

int first_publication_year(const EventLog &log, std::string_view author_id)
{
    if (!log.has_author(author_id))
        throw ReferenceError("unknown author " + std::string(author_id));
    auto year = log.first_year(author_id);
    if (!year)
        throw DomainError("author " + std::string(author_id) + " has no proceedings publication; age undefined");
    return *year;
}

AnnualProfile annual_profile(const EventLog &log, std::string_view author_id, int year)
{
    if (!log.has_author(author_id))
        throw ReferenceError("unknown author " + std::string(author_id));
    AnnualProfile profile;
    std::set<std::string_view> coauthors;
    for (const auto *pub : log.publications_of(author_id)) {
        if (pub->year != year)
            continue;
        ++profile.publications;
        for (const auto &id : pub->author_ids)
            if (id != author_id)
                coauthors.insert(id);
    }
    profile.unique_coauthors = static_cast<int>(coauthors.size());
    return profile;
}

} // namespace mfnet
