#pragma once

#include <string>
#include <vector>

#include "polya/model.hpp"
#include "polya/simulate.hpp"

namespace polya::io {

/// Formats a double with 17 significant digits (lossless round-trip).
std::string format_double(double v);

/// Parses the scenario key = value format:
///   dimension = 2
///   matrix = [-1, 1, 1, -1]          # row-major; entries are numbers or exp(rate)
///   init = [3, 5]
///   horizon = 10
///   checkpoints = [1, 10]
///   ensemble_size = 100000           # optional, default 10000
///   seed = 42                        # optional, default 0
/// Unknown keys are ParseErrors; invariant violations are ValidationErrors.
model::ScenarioConfig parse_scenario(const std::string& text);

/// Canonical text form of a config; parse_scenario(serialize_scenario(c))
/// reproduces c exactly.
std::string serialize_scenario(const model::ScenarioConfig& config);

/// Stats CSV. One row per (checkpoint, coordinate); coordinates are 1-based.
/// A row carries the coordinate's mean/variance and, when a partner
/// coordinate follows it, the covariance with that partner, so every
/// unordered pair appears exactly once. Rows sorted by
/// (checkpoint_time, coordinate, covariance_partner).
std::string stats_to_csv(const sim::EnsembleStats& stats);
std::string stats_to_json(const sim::EnsembleStats& stats);

/// Closed-form event-count probabilities as CSV (columns ell, probability).
std::string kolmogorov_csv(double i, double delta, int ell_max, double t);

/// Numeric content of one stats CSV row; used for round-trip checks.
struct StatsCsvRow {
    double checkpoint_time;
    int coordinate;
    double mean;
    double variance;
    int covariance_partner;  // 0 when absent
    double covariance;       // meaningful only when partner != 0
    std::uint64_t n;
};
std::vector<StatsCsvRow> parse_stats_csv(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace polya::io
