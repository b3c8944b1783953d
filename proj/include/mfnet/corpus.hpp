#pragma once

#include "mfnet/geography.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mfnet {

enum class VenueKind { proceedings, other };

// Maps a BibTeX-style entry type to a venue kind: "inproceedings" and
// "proceedings" are proceedings, everything else is other.
VenueKind parse_venue_kind(std::string_view text);

struct PublicationRecord {
    std::string paper_id;
    int year = 0;
    VenueKind venue_kind = VenueKind::proceedings;
    std::vector<std::string> author_ids;
};

struct AuthorRecord {
    std::string author_id;
    std::string affiliation_id;
    std::string display_name;
};

struct AffiliationRecord {
    std::string institution_id;
    std::string label;
    std::string country_code;
    Continent continent = Continent::unknown;
    double latitude = 0.0;
    double longitude = 0.0;
};

// Reserved institution for authors listed without an affiliation.
inline constexpr std::string_view kUnknownInstitution = "UNKNOWN";
inline constexpr std::string_view kUnknownCountry = "ZZ";

struct YearWindow {
    int first = 1971;
    int last = 2010;
};

struct AnnualProfile {
    int publications = 0;
    int unique_coauthors = 0;

    friend bool operator==(const AnnualProfile &, const AnnualProfile &) = default;
};

// Validated, immutable bibliographic event log. The default view holds
// proceedings only; `all_publications` keeps every venue.
class EventLog {
  public:
    EventLog(std::vector<PublicationRecord> publications, std::vector<AuthorRecord> authors,
             std::vector<AffiliationRecord> affiliations, YearWindow window = {});

    // Proceedings publications ordered by (year, paper_id).
    const std::vector<PublicationRecord> &publications() const { return proceedings_; }
    const std::vector<PublicationRecord> &all_publications() const { return all_; }

    // Proceedings publications of one year, ordered by paper_id.
    std::vector<const PublicationRecord *> publications_in(int year) const;

    // Proceedings publications listing the author, ordered by (year, paper_id).
    std::vector<const PublicationRecord *> publications_of(std::string_view author_id) const;

    const std::map<std::string, AuthorRecord, std::less<>> &authors() const { return authors_; }
    const std::map<std::string, AffiliationRecord, std::less<>> &affiliations() const
    {
        return affiliations_;
    }

    bool has_author(std::string_view author_id) const;
    const AuthorRecord &author(std::string_view author_id) const;
    const AffiliationRecord &affiliation_of(std::string_view author_id) const;

    // Earliest proceedings year of the author, if any.
    std::optional<int> first_year(std::string_view author_id) const;

    YearWindow window() const { return window_; }

    // Same log with non-proceedings records dropped. Idempotent.
    EventLog proceedings_only() const;

  private:
    std::vector<PublicationRecord> all_;
    std::vector<PublicationRecord> proceedings_;
    std::map<std::string, AuthorRecord, std::less<>> authors_;
    std::map<std::string, AffiliationRecord, std::less<>> affiliations_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> by_author_;
    std::map<int, std::vector<std::size_t>> by_year_;
    YearWindow window_;
};

struct LoadOptions {
    YearWindow window;
    bool drop_outside_window = true; // otherwise such papers are an error
};

// Reads the three input files. The publications file is CSV unless its
// extension is .jsonl/.json, in which case it is read as JSON lines.
EventLog load_corpus(const std::filesystem::path &publications_path,
                     const std::filesystem::path &authors_path,
                     const std::filesystem::path &affiliations_path, const LoadOptions &options = {});

std::vector<PublicationRecord> read_publications(const std::filesystem::path &path);
std::vector<AuthorRecord> read_authors(const std::filesystem::path &path);
std::vector<AffiliationRecord> read_affiliations(const std::filesystem::path &path);

void write_publications(const std::filesystem::path &path, const std::vector<PublicationRecord> &rows);
void write_authors(const std::filesystem::path &path, const std::vector<AuthorRecord> &rows);
void write_affiliations(const std::filesystem::path &path, const std::vector<AffiliationRecord> &rows);

// Throws DomainError if the author has no proceedings publication.
int first_publication_year(const EventLog &log, std::string_view author_id);

// Proceedings papers of the author in `year` and the number of distinct
// other authors on them.
AnnualProfile annual_profile(const EventLog &log, std::string_view author_id, int year);

} // namespace mfnet
