#pragma once

#include "mfnet/corpus.hpp"
#include "mfnet/geography.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace testing {

inline mfnet::AffiliationRecord institution(const std::string &id, const std::string &country)
{
    return {id, id, country, mfnet::continents_of(country).front(), 0.0, 0.0};
}

inline mfnet::PublicationRecord paper(const std::string &id, int year, std::vector<std::string> authors,
                                      mfnet::VenueKind kind = mfnet::VenueKind::proceedings)
{
    return {id, year, kind, std::move(authors)};
}

inline mfnet::AuthorRecord author(const std::string &id, const std::string &affiliation)
{
    return {id, affiliation, id};
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string &tag)
    {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("mfnet-" + tag + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;

    const std::filesystem::path &path() const { return path_; }
    std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path &path, const std::string &text)
{
    std::ofstream(path) << text;
}

inline std::string read_text(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace testing
