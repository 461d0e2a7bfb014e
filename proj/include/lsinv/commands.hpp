#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "lsinv/manifest.hpp"
#include "lsinv/running_stats.hpp"

namespace lsinv {

/// Process exit status for `lsinv sample` when nothing survived burn-in.
inline constexpr int kExitNoSamples = 4;

struct TruthOutcome {
  std::uint64_t attempts = 0;
  std::vector<double> phase_fractions;
};

/// Draws u† ~ N(0, C_tau†) on the truth grid (or loads truth.phase_file) and
/// writes truth_coeffs, truth_levelset, truth_phase and truth.json into
/// manifest.truth_dir().
TruthOutcome cmd_make_truth(const RunManifest& manifest);

struct DataOutcome {
  std::size_t observations = 0;
  double mean_relative_error = 0.0;
};

/// Forward solve of the stored truth on its own grid plus noise; writes
/// data.csv and data.json into manifest.data_dir().
DataOutcome cmd_make_data(const RunManifest& manifest);

/// Runs the chain against data.csv and writes trace.csv, samples.csv,
/// snapshot streams, stats.json, summary.json and summary grids into
/// manifest.output.dir.
StatsSummary cmd_sample(const RunManifest& manifest);

/// Merges stats.json from each run directory and writes the merged summary
/// plus 1-D/2-D histogram CSVs for tau and the leading KL coefficients.
StatsSummary cmd_summarize(const std::vector<std::filesystem::path>& runs,
                           const std::filesystem::path& out);

inline constexpr int kHistogramBins = 50;

/// Bin counts over [lo, hi] with the last bin closed; lo == hi widens by 0.5.
struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::uint64_t> counts;
};
Histogram histogram(std::span<const double> xs, int bins = kHistogramBins);

struct Histogram2d {
  Histogram x;
  Histogram y;
  std::vector<std::uint64_t> counts;  // row-major, x outermost
};
Histogram2d histogram2d(std::span<const double> xs, std::span<const double> ys,
                        int bins = kHistogramBins);

}  // namespace lsinv
