#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mfnet {

// Continent codes used by the bundled country table. `unknown` is reserved
// for the UNKNOWN institution (country code ZZ).
enum class Continent { africa, antarctica, asia, europe, north_america, oceania, south_america, unknown };

std::string_view continent_code(Continent continent);

// Parses AF, AN, AS, EU, NA, OC, SA or ZZ.
std::optional<Continent> parse_continent(std::string_view code);

// Continents a country belongs to according to the bundled table; the first
// entry is the primary one. Empty for unknown country codes. ZZ maps to
// Continent::unknown.
std::vector<Continent> continents_of(std::string_view country_code);

bool country_on_continent(std::string_view country_code, Continent continent);

} // namespace mfnet
