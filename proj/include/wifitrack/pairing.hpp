#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "wifitrack/exec.hpp"
#include "wifitrack/trace_model.hpp"

namespace wifitrack {

/// One access point sighted in the scan chosen for a GPS fix. Carries the
/// fix's position and timestamp.
struct PairedObservation {
    BssidId bssid;
    GeoPoint pos;
    Timestamp ts;
    UserId user;

    friend bool operator==(const PairedObservation&, const PairedObservation&) = default;
};

/// Output order: (bssid, ts, user, pos).
bool observation_less(const PairedObservation& a, const PairedObservation& b);

struct PairingConfig {
    std::int64_t window_ms = 1000;
    /// Fixes reporting a worse accuracy are skipped. Off by default.
    std::optional<double> max_accuracy_m;

    void validate() const;
};

/// For every fix, picks the same user's scan with the smallest |dt| inside
/// [-window, +window] (inclusive, ties to the earlier scan) and emits one
/// observation per sighting of that scan.
std::vector<PairedObservation> pair_observations(const TraceSet& traces,
                                                 const PairingConfig& cfg = {},
                                                 Exec exec = Exec::parallel);

/// Index of the chosen scan in `scans` (one user's, sorted by ts), if any.
std::optional<std::size_t> nearest_scan(std::span<const WifiScan> scans, Timestamp t,
                                        std::int64_t window_ms);

/// Debug dump: bssid,lat,lon,ts_ms,user.
void write_pairs_csv(std::span<const PairedObservation> obs, const std::filesystem::path& path);

}  // namespace wifitrack
