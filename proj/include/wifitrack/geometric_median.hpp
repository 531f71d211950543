#pragma once

#include <span>

#include "wifitrack/geo.hpp"

namespace wifitrack {

struct WeiszfeldOptions {
    double step_tolerance_m = 1e-4;
    int max_iterations = 1000;
    /// Nudge applied when an iterate lands on a data point.
    double singularity_nudge_m = 0.01;
};

/// Point minimizing the summed distance to `points`, by Weiszfeld iteration
/// on a local equirectangular plane centred on the coordinate centroid.
/// One point returns itself; two points return their midpoint.
GeoPoint geometric_median(std::span<const GeoPoint> points, double radius_m = kEarthRadiusM,
                          const WeiszfeldOptions& opts = {});

/// Planar variant used by the geographic one; exposed for testing.
PlanePoint geometric_median_plane(std::span<const PlanePoint> points,
                                  const WeiszfeldOptions& opts = {});

}  // namespace wifitrack
