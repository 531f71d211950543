#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wifitrack/ap_locator.hpp"
#include "wifitrack/reconstructor.hpp"

namespace wifitrack {

/// covered / with_data. Absent when with_data is 0; covered > with_data is a
/// contract error.
std::optional<double> time_coverage(std::size_t with_data, std::size_t covered);

/// Days count from the UTC day holding `dataset_start`.
std::int64_t day_index(Timestamp t, Timestamp dataset_start);

struct UserDayCoverage {
    UserId user;
    std::int64_t day = 0;
    std::size_t with_data = 0;  // bins holding at least one scan, empty or not
    std::size_t covered = 0;    // bins where a known router was scanned

    double fraction() const { return *time_coverage(with_data, covered); }
    friend bool operator==(const UserDayCoverage&, const UserDayCoverage&) = default;
};

/// Per-day counts from a timeline. Days without scans are left out.
std::vector<UserDayCoverage> coverage_from_timeline(const BinnedTimeline& tl,
                                                    Timestamp dataset_start);

/// Same counts as coverage_from_timeline(build_timeline(...)) without fusing
/// positions: a bin is covered as soon as one sighting resolves.
std::vector<UserDayCoverage> user_coverage(std::span<const WifiScan> scans,
                                           const PositionLookup& db, Timestamp dataset_start,
                                           std::int64_t bin_ms = kTenMinutesMs);

struct CoverageSeries {
    std::map<std::pair<UserId, std::int64_t>, double> per_user_day;
    std::map<std::int64_t, double> daily_mean;
    std::map<std::int64_t, std::size_t> daily_users;

    static CoverageSeries from(std::span<const UserDayCoverage> rows);
};

std::optional<double> daily_population_mean(const CoverageSeries& s, std::int64_t day);

/// One label per estimated bin; unknown bins are left out.
struct EntropyInput {
    std::vector<std::string> labels;
};

/// Shannon entropy in bits of the empirical label distribution. Absent for
/// no labels.
std::optional<double> entropy_bits(const EntropyInput& in);

/// Labels each estimated bin by the AP record behind its smallest supporting
/// BSSID; a relocated AP contributes "bssid#k" for its k-th segment.
EntropyInput entropy_labels(const BinnedTimeline& tl, const ApDatabase& db);

/// coverage_users.csv: user,day_index,with_data,covered,coverage.
void write_user_coverage_csv(std::span<const UserDayCoverage> rows,
                             const std::filesystem::path& path);

}  // namespace wifitrack
