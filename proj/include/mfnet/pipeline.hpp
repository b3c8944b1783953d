#pragma once

#include "mfnet/config.hpp"

#include <filesystem>
#include <ostream>
#include <string_view>

namespace mfnet {

// File names inside the output directory.
namespace files {
inline constexpr const char *ingest_summary = "ingest_summary.csv";
inline constexpr const char *class_map = "class_map.csv";
inline constexpr const char *model = "model.json";
inline constexpr const char *trajectory = "trajectory.csv";
inline constexpr const char *trajectory_uniform = "trajectory_uniform.csv";
inline constexpr const char *oracle_trajectory = "oracle_trajectory.csv";
inline constexpr const char *oracle_compare = "oracle_compare.csv";
inline constexpr const char *class_report = "class_report.csv";
inline constexpr const char *age_report = "age_report.csv";
inline constexpr const char *triad_report = "triad_report.csv";
inline constexpr const char *baseline_diff = "baseline_diff.csv";
} // namespace files

// Each stage reads what earlier stages wrote to `output` and reports the
// files it wrote on `log`.
void run_synth(const Config &config, const std::filesystem::path &output, std::ostream &log);
void run_ingest(const Config &config, const std::filesystem::path &output, std::ostream &log);
void run_abstract(const Config &config, const std::filesystem::path &output, std::ostream &log);
void run_estimate(const Config &config, const std::filesystem::path &output, std::ostream &log);
void run_simulate(const Config &config, const std::filesystem::path &output, std::ostream &log);
void run_baseline(const Config &config, const std::filesystem::path &output, std::ostream &log);
void run_oracle(const Config &config, const std::filesystem::path &output, std::ostream &log);
void run_analyze(const Config &config, const std::filesystem::path &output, std::ostream &log);

// Dispatch by subcommand name. Throws Error on an unknown name.
void run_stage(std::string_view name, const Config &config, const std::filesystem::path &output, std::ostream &log);

} // namespace mfnet
