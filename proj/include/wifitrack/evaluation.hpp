#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wifitrack/ap_locator.hpp"
#include "wifitrack/reconstructor.hpp"
#include "wifitrack/synth_io.hpp"

namespace wifitrack {

/// Nearest-rank percentile of unsorted values, p in (0, 1]. Absent when empty.
std::optional<double> percentile(std::vector<double> values, double p);

struct ApEvaluation {
    /// truth class -> predicted class ("absent" when never paired) -> count
    std::map<std::string, std::map<std::string, std::size_t>> confusion;

    std::size_t static_eligible = 0;    // truth static with >= min_sightings pairs
    std::size_t static_located = 0;     // ... classified static within the error limit
    std::size_t static_classified = 0;  // truth static not insufficient nor absent
    std::size_t static_as_mobile = 0;
    std::vector<double> static_errors_m;  // eligible and classified static

    std::size_t mobile_classified = 0;  // truth mobile not insufficient nor absent
    std::size_t mobile_as_mobile = 0;

    std::optional<double> static_located_fraction() const;
    std::optional<double> static_mobile_rate() const;
    std::optional<double> mobile_recall() const;
    std::optional<double> median_error_m() const { return percentile(static_errors_m, 0.5); }
};

ApEvaluation evaluate_database(const ApDatabase& db, std::span<const TruthApRow> truth,
                               std::size_t min_sightings = 5, double max_error_m = 100.0);

/// One timeline bin as written to timeline.csv.
struct TimelineRow {
    UserId user;
    std::int64_t bin_index = 0;
    std::int64_t bin_start_ms = 0;
    std::optional<GeoPoint> pos;
    std::size_t support_count = 0;
};

std::vector<TimelineRow> timeline_rows(std::span<const BinnedTimeline> timelines);
std::vector<TimelineRow> read_timeline_csv(const std::filesystem::path& path);

struct BinEvaluation {
    std::size_t bins_with_data = 0;
    std::size_t bins_estimated = 0;
    std::size_t bins_without_truth = 0;
    std::vector<double> errors_m;

    std::optional<double> fraction_within(double meters) const;
};

/// Compares each estimated bin with the first truth sample at or after the
/// bin start.
BinEvaluation evaluate_bins(std::span<const TimelineRow> rows, const TruthTracks& truth);

}  // namespace wifitrack
