#pragma once

// O(n^2) DBSCAN from the definitions: core points by neighbour count, clusters
// as connected components of the core-core eps graph, border points attached
// to the first component (by smallest core index) with a core in reach.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <set>
#include <vector>

#include "oracle_geo.hpp"

namespace oracle {

struct LatLon {
    double lat, lon;
};

struct Clustering {
    std::vector<std::vector<std::size_t>> clusters;
    std::vector<std::size_t> noise;
};

inline Clustering brute_dbscan(const std::vector<LatLon>& pts, double eps_m, std::size_t min_pts) {
    const std::size_t n = pts.size();
    std::vector<std::vector<bool>> near(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            near[i][j] = great_circle_m(pts[i].lat, pts[i].lon, pts[j].lat, pts[j].lon) <= eps_m;

    std::vector<bool> core(n);
    for (std::size_t i = 0; i < n; ++i)
        core[i] = static_cast<std::size_t>(std::count(near[i].begin(), near[i].end(), true)) >= min_pts;

    // Component label per core point via repeated relaxation to the minimum
    // index in the component.
    std::vector<std::size_t> label(n);
    std::iota(label.begin(), label.end(), 0);
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!core[i]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (core[j] && near[i][j] && label[j] < label[i]) {
                    label[i] = label[j];
                    changed = true;
                }
            }
        }
    }

    std::vector<std::size_t> roots;  // ascending smallest core index
    for (std::size_t i = 0; i < n; ++i)
        if (core[i] && label[i] == i) roots.push_back(i);

    Clustering out;
    out.clusters.resize(roots.size());
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = roots.size();
        for (std::size_t k = 0; k < roots.size() && best == roots.size(); ++k) {
            for (std::size_t j = 0; j < n; ++j) {
                if (core[j] && label[j] == roots[k] && (j == i || near[i][j])) {
                    best = k;
                    break;
                }
            }
        }
        if (best == roots.size())
            out.noise.push_back(i);
        else
            out.clusters[best].push_back(i);
    }
    return out;
}

/// Clusters as a set of sets, for order-free comparison.
inline std::set<std::set<std::size_t>> as_sets(const std::vector<std::vector<std::size_t>>& cs) {
    std::set<std::set<std::size_t>> out;
    for (const auto& c : cs) out.insert(std::set<std::size_t>(c.begin(), c.end()));
    return out;
}

}  // namespace oracle
