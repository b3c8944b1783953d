#pragma once

#include "mfnet/config.hpp"
#include "mfnet/corpus.hpp"

#include <cstdint>
#include <vector>

namespace mfnet {

struct SyntheticCorpus {
    std::vector<PublicationRecord> publications;
    std::vector<AuthorRecord> authors;
    std::vector<AffiliationRecord> affiliations;
};

// Seeded toy corpus: Dutch institutions plus a few foreign ones, authors
// with career starts across the window, yearly Poisson output that grows
// with seniority, and coauthors drawn mostly from the same institution or
// country. Same options and seed give the same corpus.
SyntheticCorpus synthesize_corpus(const SynthOptions &options, YearWindow window, std::uint64_t seed);

} // namespace mfnet
