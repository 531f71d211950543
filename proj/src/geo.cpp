#include "wifitrack/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wifitrack {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
}  // namespace

double haversine_m(const GeoPoint& a, const GeoPoint& b, double radius_m) {
    const double phi1 = a.lat() * kDegToRad;
    const double phi2 = b.lat() * kDegToRad;
    const double s_phi = std::sin(0.5 * (phi2 - phi1));
    const double s_lam = std::sin(0.5 * (b.lon() - a.lon()) * kDegToRad);
    const double h = s_phi * s_phi + std::cos(phi1) * std::cos(phi2) * s_lam * s_lam;
    return 2.0 * radius_m * std::asin(std::min(1.0, std::sqrt(h)));
}

LocalFrame::LocalFrame(const GeoPoint& origin, double radius_m)
    : origin_(origin), radius_m_(radius_m), cos_lat_(std::cos(origin.lat() * kDegToRad)) {}

PlanePoint LocalFrame::to_plane(const GeoPoint& p) const {
    const double dlon = wrap_longitude(p.lon() - origin_.lon());
    return {radius_m_ * cos_lat_ * dlon * kDegToRad,
            radius_m_ * (p.lat() - origin_.lat()) * kDegToRad};
}

GeoPoint LocalFrame::to_geo(const PlanePoint& p) const {
    const double lat = std::clamp(origin_.lat() + p.y / radius_m_ * kRadToDeg, -90.0, 90.0);
    const double lon = cos_lat_ > 1e-12
                           ? wrap_longitude(origin_.lon() + p.x / (radius_m_ * cos_lat_) * kRadToDeg)
                           : origin_.lon();
    return GeoPoint(lat, lon);
}

GeoPoint coordinate_centroid(std::span<const GeoPoint> points) {
    if (points.empty()) throw ContractError("centroid of no points");
    const double ref = points.front().lon();
    double lat = 0.0;
    double dlon = 0.0;
    for (const auto& p : points) {
        lat += p.lat();
        dlon += wrap_longitude(p.lon() - ref);
    }
    const double n = static_cast<double>(points.size());
    return GeoPoint(lat / n, wrap_longitude(ref + dlon / n));
}

}  // namespace wifitrack
