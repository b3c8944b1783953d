#include "mfnet/serialization.hpp"

#include "mfnet/csv.hpp"
#include "mfnet/error.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace mfnet {

namespace {

using nlohmann::json;

std::string decimal(double x)
{
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", x);
    return buffer;
}

double parse_decimal(const json &j)
{
    if (j.is_number())
        return j.get<double>();
    const auto text = j.get<std::string>();
    char *end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0')
        throw Error("invalid decimal string '" + text + "'");
    return value;
}

json state_json(const NodeState &s) { return json::array({s.p, s.c, decade_label(s.h), s.u}); }

NodeState state_from(const json &j)
{
    if (!j.is_array() || j.size() != 4)
        throw Error("state must be [p, c, h, u]");
    NodeState s;
    s.p = j[0].get<int>();
    s.c = j[1].get<int>();
    auto h = decade_from_label(j[2].get<int>());
    if (!h)
        throw Error("invalid decade " + j[2].dump());
    s.h = *h;
    s.u = j[3].get<ClassId>();
    check_bins(s);
    return s;
}

json optional_year(const std::optional<int> &year) { return year ? json(*year) : json(nullptr); }

std::optional<int> year_from(const json &j)
{
    if (!j.contains("year") || j.at("year").is_null())
        return std::nullopt;
    return j.at("year").get<int>();
}

} // namespace

json to_json(const ContactMatrix &contact)
{
    json weights = json::array();
    for (const auto &[key, w] : contact.weights)
        weights.push_back({{"from", key.first}, {"to", key.second}, {"weight", decimal(w)}});
    return {{"year", optional_year(contact.year)}, {"classes", contact.class_count}, {"weights", weights}};
}

json to_json(const KappaTable &kappa)
{
    json entries = json::array();
    for (const auto &[key, entry] : kappa.entries) {
        json successors = json::array();
        for (const auto &s : entry.successors)
            successors.push_back({{"prob", decimal(s.probability)}, {"a", state_json(s.a)}, {"b", state_json(s.b)}});
        entries.push_back({{"a", state_json(key.first)},
                           {"b", state_json(key.second)},
                           {"observations", decimal(entry.observations)},
                           {"successors", successors}});
    }
    return {{"year", optional_year(kappa.year)}, {"entries", entries}};
}

json to_json(const SmoothedModel &model)
{
    return {{"method", model.config.method == SmoothingMethod::hmm ? "hmm" : "mean"},
            {"fallback_used", model.fallback_used},
            {"hidden_states", model.config.hidden_states},
            {"max_iterations", model.config.max_iterations},
            {"seed", model.config.seed},
            {"tolerance", decimal(model.config.tolerance)},
            {"epsilon", decimal(model.config.epsilon)},
            {"contact", to_json(model.contact)},
            {"kappa", to_json(model.kappa)}};
}

ContactMatrix contact_from_json(const json &j)
{
    try {
        ContactMatrix contact;
        contact.year = year_from(j);
        contact.class_count = j.at("classes").get<std::size_t>();
        for (const auto &w : j.at("weights")) {
            const auto key = std::make_pair(w.at("from").get<ClassId>(), w.at("to").get<ClassId>());
            if (!contact.weights.emplace(key, parse_decimal(w.at("weight"))).second)
                throw Error("duplicate contact pair");
        }
        contact.validate();
        return contact;
    } catch (const json::exception &e) {
        throw Error(std::string("malformed contact matrix: ") + e.what());
    }
}

KappaTable kappa_from_json(const json &j)
{
    try {
        KappaTable kappa;
        kappa.year = year_from(j);
        for (const auto &e : j.at("entries")) {
            KappaEntry entry;
            entry.observations = parse_decimal(e.at("observations"));
            for (const auto &s : e.at("successors"))
                entry.successors.push_back(
                    KappaSuccessor{parse_decimal(s.at("prob")), state_from(s.at("a")), state_from(s.at("b"))});
            if (!kappa.entries.emplace(StatePair{state_from(e.at("a")), state_from(e.at("b"))}, std::move(entry))
                     .second)
                throw Error("duplicate kappa entry");
        }
        kappa.validate();
        return kappa;
    } catch (const json::exception &e) {
        throw Error(std::string("malformed kappa table: ") + e.what());
    }
}

SmoothedModel model_from_json(const json &j)
{
    try {
        SmoothedModel model;
        const auto method = j.at("method").get<std::string>();
        if (method != "hmm" && method != "mean")
            throw Error("unknown smoothing method " + method);
        model.config.method = method == "hmm" ? SmoothingMethod::hmm : SmoothingMethod::mean;
        model.fallback_used = j.at("fallback_used").get<bool>();
        model.config.hidden_states = j.at("hidden_states").get<int>();
        model.config.max_iterations = j.at("max_iterations").get<int>();
        model.config.seed = j.at("seed").get<std::uint64_t>();
        model.config.tolerance = parse_decimal(j.at("tolerance"));
        model.config.epsilon = parse_decimal(j.at("epsilon"));
        model.contact = contact_from_json(j.at("contact"));
        model.kappa = kappa_from_json(j.at("kappa"));
        return model;
    } catch (const json::exception &e) {
        throw Error(std::string("malformed model: ") + e.what());
    }
}

void write_json(const std::filesystem::path &path, const json &j)
{
    auto out = csv::open_output(path);
    out << j.dump(1) << '\n';
}

json read_json(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception &e) {
        throw Error(path.string() + ": " + e.what());
    }
}

} // namespace mfnet
