#include "wifitrack/geometric_median.hpp"

#include <cmath>
#include <vector>

namespace wifitrack {

namespace {

double summed_distance(std::span<const PlanePoint> pts, PlanePoint x) {
    double s = 0.0;
    for (const auto& p : pts) s += std::hypot(p.x - x.x, p.y - x.y);
    return s;
}

}  // namespace

PlanePoint geometric_median_plane(std::span<const PlanePoint> pts, const WeiszfeldOptions& opts) {
    if (pts.empty()) throw ContractError("geometric median of no points");
    if (pts.size() == 1) return pts.front();
    if (pts.size() == 2) return {0.5 * (pts[0].x + pts[1].x), 0.5 * (pts[0].y + pts[1].y)};

    PlanePoint x{0.0, 0.0};
    for (const auto& p : pts) {
        x.x += p.x;
        x.y += p.y;
    }
    x.x /= static_cast<double>(pts.size());
    x.y /= static_cast<double>(pts.size());

    constexpr double kCoincident = 1e-9;
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        double wx = 0.0, wy = 0.0, wsum = 0.0;
        bool on_point = false;
        for (const auto& p : pts) {
            const double d = std::hypot(p.x - x.x, p.y - x.y);
            if (d < kCoincident) {
                on_point = true;
                break;
            }
            wx += p.x / d;
            wy += p.y / d;
            wsum += 1.0 / d;
        }
        if (on_point) {
            x.x += opts.singularity_nudge_m;
            continue;
        }
        const PlanePoint next{wx / wsum, wy / wsum};
        const double step = std::hypot(next.x - x.x, next.y - x.y);
        x = next;
        if (step < opts.step_tolerance_m) break;
    }

    // Weiszfeld crawls when the optimum sits on a data point, so test the
    // nearest data point directly: it is optimal when the pull of the other
    // points does not exceed its multiplicity.
    const PlanePoint* nearest = &pts.front();
    double best = std::hypot(nearest->x - x.x, nearest->y - x.y);
    for (const auto& p : pts) {
        const double d = std::hypot(p.x - x.x, p.y - x.y);
        if (d < best) {
            best = d;
            nearest = &p;
        }
    }
    double rx = 0.0, ry = 0.0, mult = 0.0;
    for (const auto& p : pts) {
        const double d = std::hypot(p.x - nearest->x, p.y - nearest->y);
        if (d < kCoincident) {
            mult += 1.0;
            continue;
        }
        rx += (p.x - nearest->x) / d;
        ry += (p.y - nearest->y) / d;
    }
    if (std::hypot(rx, ry) <= mult) return *nearest;
    if (summed_distance(pts, *nearest) < summed_distance(pts, x)) return *nearest;
    return x;
}

GeoPoint geometric_median(std::span<const GeoPoint> points, double radius_m,
                          const WeiszfeldOptions& opts) {
    if (points.empty()) throw ContractError("geometric median of no points");
    if (points.size() == 1) return points.front();
    const LocalFrame frame(coordinate_centroid(points), radius_m);
    std::vector<PlanePoint> plane;
    plane.reserve(points.size());
    for (const auto& p : points) plane.push_back(frame.to_plane(p));
    return frame.to_geo(geometric_median_plane(plane, opts));
}

}  // namespace wifitrack
