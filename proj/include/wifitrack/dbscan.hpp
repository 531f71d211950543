#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wifitrack/exec.hpp"
#include "wifitrack/geo.hpp"

namespace wifitrack {

/// Clusters hold ascending point indices and are ordered by their smallest
/// core point. Clusters and noise together partition the input.
struct DbscanResult {
    std::vector<std::vector<std::size_t>> clusters;
    std::vector<std::size_t> noise;

    friend bool operator==(const DbscanResult&, const DbscanResult&) = default;
};

/// DBSCAN under the haversine metric. A point is core when at least
/// `min_pts` points (itself included) lie within `eps_m`. A border point joins
/// the earliest-discovered cluster that reaches it, discovery running over
/// indices in ascending order.
///
/// Uses a grid over a local projection for compact inputs; wide or polar
/// inputs fall back to dbscan_reference. Core counting and border assignment
/// run under OpenMP when exec is parallel.
DbscanResult dbscan(std::span<const GeoPoint> points, double eps_m, std::size_t min_pts,
                    double radius_m = kEarthRadiusM, Exec exec = Exec::parallel);

/// Textbook queue-expansion DBSCAN with linear-scan region queries.
DbscanResult dbscan_reference(std::span<const GeoPoint> points, double eps_m,
                              std::size_t min_pts, double radius_m = kEarthRadiusM);

}  // namespace wifitrack
