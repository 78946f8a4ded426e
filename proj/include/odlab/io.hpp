#pragma once

#include <optional>
#include <string>

#include "odlab/experiments.hpp"

namespace odlab {

inline constexpr int kSpecVersion = 1;

/// Writes content to path via a temp file + rename, so a failed run never
/// leaves a partial file behind.
void atomic_write_file(const std::string& path, const std::string& content);

/// Locale-independent formatting: '.' decimal separator, "inf" for infinite
/// or missing values.
std::string format_double(double value);
std::string format_hit(const HitTime& hit);

// trials.csv / summary.csv bodies.
std::string trials_csv(const ExperimentResult& result);
std::string summary_csv(const ExperimentResult& result);

// Resolved-spec echo, round-trippable through parse_spec_json.
std::string spec_json(const ExperimentSpec& spec);
ExperimentSpec parse_spec_json(const std::string& text);

/// Writes trials.csv, summary.csv and spec.json under out_dir.
void write_experiment_output(const ExperimentResult& result, const std::string& out_dir);

}  // namespace odlab
