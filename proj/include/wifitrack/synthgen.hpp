#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "wifitrack/exec.hpp"
#include "wifitrack/geo.hpp"
#include "wifitrack/trace_model.hpp"

namespace wifitrack {

struct WorldSpec {
    std::uint64_t seed = 1;
    int n_users = 30;
    int n_days = 30;
    double city_km_x = 10.0;
    double city_km_y = 10.0;
    /// Population density grid, row-major from the south-west corner. Left
    /// empty, a field of Gaussian bumps over a floor is generated.
    int density_cells = 20;
    std::vector<double> density_weights;
    int n_buildings = 350;
    int n_static_aps = 3000;
    /// Log-sigma of the multiplicative noise on per-building AP counts.
    double ap_count_sigma = 0.6;
    double visibility_radius_m = 100.0;
    double wifi_scan_period_s = 16.0;
    double gps_period_s = 600.0;
    double gps_noise_m = 10.0;
    double mobile_ap_fraction = 0.02;
    std::optional<int> routine_change_day;
    double colocated_fraction = 0.8;
    int n_relocated_aps = 0;
    double center_lat = 55.6761;
    double center_lon = 12.5683;
    /// 2012-10-01 00:00 UTC, a Monday.
    std::int64_t origin_ms = 1349049600000;

    void validate() const;
};

enum class TruthApKind { building, relocated, hotspot, bus };

struct TruthAp {
    BssidId bssid;
    TruthApKind kind = TruthApKind::building;
    Ssid ssid;
    PlanePoint pos;        // building and relocated (before the move)
    PlanePoint pos_after;  // relocated only
    std::int64_t move_ms = 0;
    int owner = -1;  // hotspot: owning user index
    int loop = -1;   // bus: loop index
};

struct Building {
    PlanePoint pos;
    double density = 0.0;
    std::vector<std::size_t> aps;
};

/// A place a user can stay at. Outdoor places have no building.
struct Place {
    PlanePoint pos;
    int building = -1;
};

struct BusLoop {
    std::vector<PlanePoint> stops;  // closed polygon
    std::vector<double> cum_m;      // cumulative length at each stop, plus total
    double speed_mps = 7.0;
    double phase_m = 0.0;

    PlanePoint position_at(std::int64_t t_ms) const;
};

/// Piecewise-linear movement; a stay has from == to.
struct Segment {
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
    PlanePoint from;
    PlanePoint to;
    int place = -1;  // -1 while travelling
    /// Travelling, or staying somewhere other than home or work. A user's
    /// hotspot is only switched on during such segments.
    bool away = false;
};

struct Anchors {
    int home = -1;
    int work = -1;
    std::vector<int> others;
    std::vector<double> weights;
    int outdoor = -1;
};

struct UserTruth {
    UserId id;
    Anchors anchors;
    bool colocated = false;
    int hotspot = -1;
    /// Index of the user whose anchors are adopted at the routine change.
    int partner = -1;
    std::vector<Segment> segments;  // contiguous, covering the whole period
};

struct GroundTruth {
    WorldSpec spec;
    LocalFrame frame{GeoPoint{}};
    double cell_w_m = 500.0;
    double cell_h_m = 500.0;
    std::vector<double> density;  // normalized to mean 1
    std::vector<Building> buildings;
    std::vector<Place> places;
    std::vector<TruthAp> aps;
    std::vector<BusLoop> loops;
    std::vector<UserTruth> users;
    int campus = -1;  // place index

    std::int64_t start_ms() const { return spec.origin_ms; }
    std::int64_t end_ms() const {
        return spec.origin_ms + static_cast<std::int64_t>(spec.n_days) * kDayMs;
    }

    const Segment& user_segment(std::size_t u, std::int64_t t_ms) const;
    PlanePoint user_plane(std::size_t u, std::int64_t t_ms) const;
    GeoPoint user_position(std::size_t u, Timestamp t) const;
    PlanePoint ap_plane(std::size_t ap, std::int64_t t_ms) const;
    GeoPoint ap_position(std::size_t ap, Timestamp t) const;
    /// "static", "relocated" or "mobile".
    const char* ap_class(std::size_t ap) const;
    bool is_mobile(std::size_t ap) const;
    /// Whether the AP is broadcasting at t; hotspots only while their owner
    /// is away.
    bool ap_active(std::size_t ap, std::int64_t t_ms) const;
    /// Normalized density of the grid cell holding p; 0 outside the grid.
    double density_at(PlanePoint p) const;
};

/// City, AP deployment, users, anchors and schedules.
GroundTruth generate_world(const WorldSpec& spec, Exec exec = Exec::parallel);

struct SensorStats {
    std::size_t scans = 0;
    std::size_t nonempty_scans = 0;
    std::size_t sightings = 0;
    std::size_t fixes = 0;
    /// r^2 of per-scan AP count against the density of the scan's cell.
    std::optional<double> density_r2;

    double nonempty_fraction() const {
        return scans ? static_cast<double>(nonempty_scans) / static_cast<double>(scans) : 0.0;
    }
};

struct SensorOutput {
    TraceSet traces;
    SensorStats stats;
};

/// WiFi scans listing every AP within the visibility radius of the true
/// position, and noisy GPS fixes.
SensorOutput simulate_sensors(const GroundTruth& gt, Exec exec = Exec::parallel);

/// Per user, the share of time after the routine change spent at places the
/// user never stayed at before it. Empty without a routine change.
std::vector<double> routine_change_new_mass(const GroundTruth& gt);

}  // namespace wifitrack
