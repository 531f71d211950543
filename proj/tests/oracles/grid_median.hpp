#pragma once

// Exhaustive search for the point minimising summed great-circle distance,
// on a fixed-step grid over the points' bounding box.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "brute_dbscan.hpp"
#include "oracle_geo.hpp"

namespace oracle {

inline double summed_distance(const std::vector<LatLon>& pts, LatLon x) {
    double s = 0.0;
    for (const auto& p : pts) s += great_circle_m(p.lat, p.lon, x.lat, x.lon);
    return s;
}

inline LatLon grid_median(const std::vector<LatLon>& pts, double step_m = 0.5) {
    double lat0 = 90, lat1 = -90, lon0 = 180, lon1 = -180;
    for (const auto& p : pts) {
        lat0 = std::min(lat0, p.lat);
        lat1 = std::max(lat1, p.lat);
        lon0 = std::min(lon0, p.lon);
        lon1 = std::max(lon1, p.lon);
    }
    constexpr double rad = std::numbers::pi / 180.0;
    const double m_per_deg = 6'371'000.0 * rad;
    const double dlat = step_m / m_per_deg;
    const double dlon = step_m / (m_per_deg * std::cos(0.5 * (lat0 + lat1) * rad));
    // Unit vectors, so each candidate costs one chord and one asin per point.
    struct Vec {
        double x, y, z;
    };
    const auto unit = [&](double lat, double lon) {
        return Vec{std::cos(lat * rad) * std::cos(lon * rad), std::cos(lat * rad) * std::sin(lon * rad),
                   std::sin(lat * rad)};
    };
    std::vector<Vec> v;
    for (const auto& p : pts) v.push_back(unit(p.lat, p.lon));
    LatLon best{lat0, lon0};
    double best_cost = std::numeric_limits<double>::infinity();
    const auto nlat = static_cast<long>(std::ceil((lat1 - lat0) / dlat));
    const auto nlon = static_cast<long>(std::ceil((lon1 - lon0) / dlon));
    for (long i = 0; i <= nlat; ++i)
        for (long j = 0; j <= nlon; ++j) {
            const LatLon x{lat0 + static_cast<double>(i) * dlat, lon0 + static_cast<double>(j) * dlon};
            const Vec u = unit(x.lat, x.lon);
            double c = 0.0;
            for (const auto& w : v) {
                const double dx = u.x - w.x, dy = u.y - w.y, dz = u.z - w.z;
                c += std::asin(std::min(1.0, 0.5 * std::sqrt(dx * dx + dy * dy + dz * dz)));
            }
            if (c < best_cost) {
                best_cost = c;
                best = x;
            }
        }
    return best;
}

}  // namespace oracle
