#pragma once

#include "wifitrack/trace_model.hpp"

namespace wifitrack {

inline constexpr double kEarthRadiusM = 6'371'000.0;

/// Great-circle distance in meters.
double haversine_m(const GeoPoint& a, const GeoPoint& b, double radius_m = kEarthRadiusM);

struct PlanePoint {
    double x = 0.0;  // east, meters
    double y = 0.0;  // north, meters
};

/// Equirectangular projection about an origin. Accurate to well under a
/// centimeter for the few-hundred-meter extents it is used on.
class LocalFrame {
public:
    LocalFrame(const GeoPoint& origin, double radius_m = kEarthRadiusM);

    PlanePoint to_plane(const GeoPoint& p) const;
    GeoPoint to_geo(const PlanePoint& p) const;
    const GeoPoint& origin() const { return origin_; }

private:
    GeoPoint origin_;
    double radius_m_;
    double cos_lat_;
};

/// Mean of latitudes and of (unwrapped) longitudes; a projection origin, not
/// a spherical centroid.
GeoPoint coordinate_centroid(std::span<const GeoPoint> points);

}  // namespace wifitrack
