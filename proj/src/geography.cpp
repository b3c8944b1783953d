#include "mfnet/geography.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace mfnet {

namespace {

struct CountryRow {
    std::string_view countries;
    Continent continent;
};

// UN geoscheme country list per continent (Americas split at Panama/Colombia).
// Transcontinental states are listed again in kSecondary.
constexpr std::array<CountryRow, 7> kPrimary{{
    {"DZ AO BJ BW BF BI CV CM CF TD KM CD CG CI DJ EG GQ ER SZ ET GA GM GH GN GW KE LS LR LY MG MW ML "
     "MR MU YT MA MZ NA NE NG RE RW SH ST SN SC SL SO ZA SS SD TZ TG TN UG EH ZM ZW",
     Continent::africa},
    {"AQ BV GS HM TF", Continent::antarctica},
    {"AF AM AZ BH BD BT BN KH CN CY GE HK IN ID IR IQ IL JP JO KZ KW KG LA LB MO MY MV MN MM NP KP OM "
     "PK PS PH QA SA SG KR LK SY TW TJ TH TL TR TM AE UZ VN YE IO CX CC",
     Continent::asia},
    {"AX AL AD AT BY BE BA BG HR CZ DK EE FO FI FR DE GI GR GG VA HU IS IE IM IT JE XK LV LI LT LU MT "
     "MD MC ME NL MK NO PL PT RO RU SM RS SK SI ES SJ SE CH UA GB",
     Continent::europe},
    {"AI AG AW BS BB BZ BM BQ VG CA KY CR CU CW DM DO SV GL GD GP GT HT HN JM MQ MX MS NI PA PR BL KN "
     "LC MF PM VC SX TT TC US VI UM",
     Continent::north_america},
    {"AS AU CK FJ PF GU KI MH FM NR NC NZ NU NF MP PW PG PN WS SB TK TO TV VU WF", Continent::oceania},
    {"AR BO BR CL CO EC FK GF GY PY PE SR UY VE", Continent::south_america},
}};

constexpr std::array<std::pair<std::string_view, Continent>, 9> kSecondary{{
    {"RU", Continent::asia},
    {"TR", Continent::europe},
    {"KZ", Continent::europe},
    {"AZ", Continent::europe},
    {"GE", Continent::europe},
    {"AM", Continent::europe},
    {"CY", Continent::europe},
    {"EG", Continent::asia},
    {"UM", Continent::oceania},
}};

bool list_contains(std::string_view list, std::string_view code)
{
    for (std::size_t pos = 0; pos + 2 <= list.size(); pos += 3)
        if (list.substr(pos, 2) == code)
            return true;
    return false;
}

} // namespace

std::string_view continent_code(Continent continent)
{
    switch (continent) {
    case Continent::africa:
        return "AF";
    case Continent::antarctica:
        return "AN";
    case Continent::asia:
        return "AS";
    case Continent::europe:
        return "EU";
    case Continent::north_america:
        return "NA";
    case Continent::oceania:
        return "OC";
    case Continent::south_america:
        return "SA";
    case Continent::unknown:
        return "ZZ";
    }
    return "ZZ";
}

std::optional<Continent> parse_continent(std::string_view code)
{
    for (Continent c : {Continent::africa, Continent::antarctica, Continent::asia, Continent::europe,
                        Continent::north_america, Continent::oceania, Continent::south_america,
                        Continent::unknown})
        if (continent_code(c) == code)
            return c;
    return std::nullopt;
}

std::vector<Continent> continents_of(std::string_view country_code)
{
    std::vector<Continent> result;
    if (country_code == "ZZ") {
        result.push_back(Continent::unknown);
        return result;
    }
    if (country_code.size() != 2)
        return result;
    for (const auto &row : kPrimary)
        if (list_contains(row.countries, country_code))
            result.push_back(row.continent);
    for (const auto &[code, continent] : kSecondary)
        if (code == country_code)
            result.push_back(continent);
    return result;
}

bool country_on_continent(std::string_view country_code, Continent continent)
{
    const auto all = continents_of(country_code);
    return std::find(all.begin(), all.end(), continent) != all.end();
}

} // namespace mfnet
