#pragma once

#include "mfnet/estimation.hpp"

#include <json.hpp>

#include <filesystem>

namespace mfnet {

// Numbers are written as decimal strings with 17 significant digits so a
// read-back reproduces every double exactly. States are [p, c, h, u] with h
// given by its decade label (70, 80, 90, 2000, 2010).
nlohmann::json to_json(const ContactMatrix &contact);
nlohmann::json to_json(const KappaTable &kappa);
nlohmann::json to_json(const SmoothedModel &model);

ContactMatrix contact_from_json(const nlohmann::json &j);
KappaTable kappa_from_json(const nlohmann::json &j);
SmoothedModel model_from_json(const nlohmann::json &j);

void write_json(const std::filesystem::path &path, const nlohmann::json &j);
nlohmann::json read_json(const std::filesystem::path &path);

} // namespace mfnet
