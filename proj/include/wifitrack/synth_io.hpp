#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wifitrack/synthgen.hpp"

namespace wifitrack {

struct TruthApRow {
    BssidId bssid;
    std::string cls;  // static, relocated or mobile
    /// Static position; the starting position for relocated APs; absent for
    /// mobile ones.
    std::optional<GeoPoint> pos;
    std::string ssid;

    friend bool operator==(const TruthApRow&, const TruthApRow&) = default;
};

/// Ascending by BSSID.
std::vector<TruthApRow> truth_ap_rows(const GroundTruth& gt);

/// Per user, (ts_ms, position) samples in time order.
using TruthTracks = std::map<UserId, std::vector<std::pair<std::int64_t, GeoPoint>>>;

/// Positions at every whole minute of the simulated period.
TruthTracks truth_tracks(const GroundTruth& gt);

/// Writes gps.jsonl, wifi.jsonl, truth_aps.csv and truth_positions.csv.
void write_dataset(const GroundTruth& gt, const TraceSet& traces,
                   const std::filesystem::path& dir);

void write_truth_aps_csv(const GroundTruth& gt, const std::filesystem::path& path);
void write_truth_positions_csv(const GroundTruth& gt, const std::filesystem::path& path);

/// Readers for the truth files; any row order is accepted.
std::vector<TruthApRow> read_truth_aps_csv(const std::filesystem::path& path);
TruthTracks read_truth_positions_csv(const std::filesystem::path& path);

}  // namespace wifitrack
