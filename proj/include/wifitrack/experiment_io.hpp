#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "wifitrack/experiments.hpp"

namespace wifitrack {

/// experiment_grid.csv: strategy,param,scenario,day,mean_coverage,n_users.
void write_grid_csv(std::span<const ExperimentResult> results, const std::filesystem::path& path);

/// coverage.csv: day_index,scenario,strategy,param,mean_coverage,n_users.
void write_coverage_csv(std::span<const ExperimentResult> results,
                        const std::filesystem::path& path);

/// histograms.csv: strategy,param,scenario,day,bin_lo,count.
void write_histograms_csv(std::span<const ExperimentResult> results,
                          const std::filesystem::path& path);

/// Daily mean coverage against day, one line per result.
void write_svg_plot(std::span<const ExperimentResult> results, const std::string& title,
                    const std::filesystem::path& path);

/// One SVG per (strategy, param) in `dir`, named <strategy>_<param>.svg.
/// Results must be grouped as run_grid orders them.
void write_grid_plots(std::span<const ExperimentResult> results, const std::filesystem::path& dir);

}  // namespace wifitrack
