#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "wifitrack/ap_locator.hpp"
#include "wifitrack/exec.hpp"

namespace wifitrack {

struct PositionEstimate {
    UserId user;
    Timestamp ts;
    GeoPoint pos;
    /// BSSIDs that resolved at ts, ascending.
    std::vector<BssidId> support;

    friend bool operator==(const PositionEstimate&, const PositionEstimate&) = default;
};

/// Bins holding at least one scan, keyed by floor(ts / bin_ms). A bin maps to
/// nothing when none of its scans resolved.
struct BinnedTimeline {
    UserId user;
    std::int64_t bin_ms = kTenMinutesMs;
    std::map<std::int64_t, std::optional<PositionEstimate>> bins;

    std::size_t estimated_bins() const;
    friend bool operator==(const BinnedTimeline&, const BinnedTimeline&) = default;
};

/// Located sightings of the scan; absent with no hits, the AP position with
/// one, the geometric median of the AP positions with several.
std::optional<PositionEstimate> resolve_scan(const WifiScan& scan, const PositionLookup& db,
                                             double radius_m = kEarthRadiusM);

/// One user's scans in time order; the first resolvable scan of a bin gives
/// its estimate.
BinnedTimeline build_timeline(std::span<const WifiScan> scans, const PositionLookup& db,
                              std::int64_t bin_ms = kTenMinutesMs);

/// One timeline per user present in `traces`, in user order.
std::vector<BinnedTimeline> build_timelines(const TraceSet& traces, const PositionLookup& db,
                                            std::int64_t bin_ms = kTenMinutesMs,
                                            Exec exec = Exec::parallel);

/// timeline.csv: user,bin_index,bin_start_ms,lat,lon,support_count.
void write_timeline_csv(std::span<const BinnedTimeline> timelines,
                        const std::filesystem::path& path);

}  // namespace wifitrack
