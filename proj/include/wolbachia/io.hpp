#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wolbachia/cost.hpp"
#include "wolbachia/model.hpp"
#include "wolbachia/pareto.hpp"
#include "wolbachia/release.hpp"

namespace wolbachia {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Writes to a sibling temporary file and renames it over `path`. Creates
/// parent directories.
void atomic_write(const std::filesystem::path& path, std::string_view content);

/// day, release, the 18 compartments, N_h, I_v, I_v_w. One row per day 0..T.
std::string trajectory_csv(const std::vector<StateVector>& daily,
                           const ReleaseSchedule& schedule,
                           const ModelParameters& params);

/// Compartment columns of a trajectory CSV, one state per row.
std::vector<StateVector> parse_trajectory_csv(std::string_view csv);

/// day, release, release_cost, societal_cost, cumulative_total.
std::string cost_csv(const CostBreakdown& cost, const ReleaseSchedule& schedule);

/// piece, first_day, last_day, release.
std::string policy_csv(const std::vector<double>& values, int horizon);

/// k, budget_cap, release_cost, societal_cost, failed, dominated, r_1..r_N.
std::string pareto_csv(const ParetoFront& front, int pieces);

struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal SVG line chart with linear axes.
std::string svg_line_chart(const std::vector<ChartSeries>& series,
                           std::string_view title, std::string_view x_label,
                           std::string_view y_label);

struct OutputEntry {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::size_t bytes = 0;
};

struct RunRecord {
  std::string command;
  std::string scenario_sha256;
  std::uint64_t seed = 0;
  std::vector<OutputEntry> outputs;
  std::optional<std::string> started;
  std::optional<std::string> finished;
};

/// Writes files into one directory and keeps their digests for the manifest.
class OutputWriter {
 public:
  OutputWriter(std::filesystem::path dir, RunRecord record);

  void write(const std::string& relative, std::string_view content);
  const std::filesystem::path& dir() const noexcept { return dir_; }
  RunRecord& record() noexcept { return record_; }

  /// Writes manifest.json and returns its text.
  std::string finish();

 private:
  std::filesystem::path dir_;
  RunRecord record_;
};

/// Current UTC time as ISO 8601.
std::string utc_timestamp();

}  // namespace wolbachia
