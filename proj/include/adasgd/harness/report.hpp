#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "adasgd/harness/experiment.hpp"
#include "adasgd/oracles/statistics.hpp"

namespace adasgd::harness {

inline constexpr const char* kCsvHeader = "experiment_id,env,B,samples,mean_gap,stderr,n_replications,diverged_count";

/// %.10g, the number format shared by the CSV and the SVG data attributes.
std::string format_number(double value);

/// CSV rows sorted by (B, samples), header first.
std::string to_csv(const ExperimentResult& result);

struct SvgSeries {
  std::string label;
  std::vector<std::uint64_t> samples;
  std::vector<double> gaps;
};

/// Log-log plot with one polyline per series, a legend and a dotted reference
/// line of the given slope through the midpoint of the first series.
/// Only positive finite gaps are drawn. Throws std::invalid_argument for empty
/// input or when no series has a positive gap.
std::string render_svg(const std::vector<SvgSeries>& series, const std::vector<oracles::RateFit>& fits,
                       double reference_slope, const std::string& title = "");

std::string render_svg(const ExperimentResult& result);

struct WrittenFiles {
  std::filesystem::path csv;
  std::filesystem::path svg;
};

/// Writes <dir>/<id>.csv and <dir>/<id>.svg.
WrittenFiles write_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

/// One line per batch size with the fitted slope over the default window.
std::string fit_summary(const ExperimentResult& result);

}  // namespace adasgd::harness
