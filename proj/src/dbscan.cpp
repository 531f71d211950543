#include "wifitrack/dbscan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace wifitrack {

namespace {

constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

DbscanResult collect(const std::vector<std::size_t>& label, std::size_t n_clusters) {
    DbscanResult out;
    out.clusters.resize(n_clusters);
    for (std::size_t i = 0; i < label.size(); ++i) {
        if (label[i] == kUnassigned)
            out.noise.push_back(i);
        else
            out.clusters[label[i]].push_back(i);
    }
    return out;
}

// Projection distortion stays below this factor under the grid preconditions.
constexpr double kDistortion = 0.05;
constexpr double kMaxAbsLat = 75.0;
constexpr double kMaxLatSpan = 0.2;
constexpr double kMaxLonSpan = 0.5;
// Same-cell pairs are at most 0.6*sqrt(2)*(1+distortion) < 1 eps apart.
constexpr double kCellFraction = 0.6;
constexpr int kReach = 2;  // ceil((1/(1-distortion)) / kCellFraction)

struct Grid {
    std::vector<std::size_t> order;                 // point indices grouped by cell
    std::vector<std::size_t> cell_begin;            // per cell, into order
    std::vector<std::size_t> cell_of;               // per point
    std::vector<std::vector<std::size_t>> nearby;   // per cell, cells within reach (incl. self)

    std::span<const std::size_t> members(std::size_t c) const {
        return std::span<const std::size_t>(order).subspan(cell_begin[c],
                                                           cell_begin[c + 1] - cell_begin[c]);
    }
    std::size_t cell_count() const { return cell_begin.size() - 1; }
};

bool grid_applicable(std::span<const GeoPoint> pts) {
    double lat_lo = 90.0, lat_hi = -90.0, lon_lo = 0.0, lon_hi = 0.0;
    const double ref = pts.front().lon();
    for (const auto& p : pts) {
        if (std::abs(p.lat()) > kMaxAbsLat) return false;
        lat_lo = std::min(lat_lo, p.lat());
        lat_hi = std::max(lat_hi, p.lat());
        const double d = wrap_longitude(p.lon() - ref);
        lon_lo = std::min(lon_lo, d);
        lon_hi = std::max(lon_hi, d);
    }
    return lat_hi - lat_lo <= kMaxLatSpan && lon_hi - lon_lo <= kMaxLonSpan;
}

Grid build_grid(std::span<const GeoPoint> pts, double eps_m, double radius_m) {
    const LocalFrame frame(coordinate_centroid(pts), radius_m);
    const double side = eps_m * kCellFraction;
    const std::size_t n = pts.size();

    std::vector<std::pair<std::int64_t, std::int64_t>> cell_xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto q = frame.to_plane(pts[i]);
        cell_xy[i] = {static_cast<std::int64_t>(std::floor(q.x / side)),
                      static_cast<std::int64_t>(std::floor(q.y / side))};
    }

    Grid g;
    g.order.resize(n);
    std::iota(g.order.begin(), g.order.end(), std::size_t{0});
    std::stable_sort(g.order.begin(), g.order.end(),
                     [&](std::size_t a, std::size_t b) { return cell_xy[a] < cell_xy[b]; });

    const auto key = [](std::int64_t x, std::int64_t y) {
        return (static_cast<std::uint64_t>(x) << 32) ^ (static_cast<std::uint64_t>(y) & 0xffffffffULL);
    };
    std::unordered_map<std::uint64_t, std::size_t> index;
    std::vector<std::pair<std::int64_t, std::int64_t>> coords;
    g.cell_of.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& xy = cell_xy[g.order[k]];
        if (k == 0 || xy != cell_xy[g.order[k - 1]]) {
            index.emplace(key(xy.first, xy.second), coords.size());
            coords.push_back(xy);
            g.cell_begin.push_back(k);
        }
        g.cell_of[g.order[k]] = coords.size() - 1;
    }
    g.cell_begin.push_back(n);

    g.nearby.resize(coords.size());
    for (std::size_t c = 0; c < coords.size(); ++c) {
        for (int dx = -kReach; dx <= kReach; ++dx)
            for (int dy = -kReach; dy <= kReach; ++dy) {
                const auto it = index.find(key(coords[c].first + dx, coords[c].second + dy));
                if (it != index.end()) g.nearby[c].push_back(it->second);
            }
        std::sort(g.nearby[c].begin(), g.nearby[c].end());
    }
    return g;
}

struct DisjointSet {
    std::vector<std::size_t> parent;
    explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

DbscanResult dbscan_reference(std::span<const GeoPoint> points, double eps_m,
                              std::size_t min_pts, double radius_m) {
    if (min_pts < 1) throw ContractError("min_pts must be >= 1");
    const std::size_t n = points.size();
    const auto region = [&](std::size_t p) {
        std::vector<std::size_t> out;
        for (std::size_t q = 0; q < n; ++q)
            if (haversine_m(points[p], points[q], radius_m) <= eps_m) out.push_back(q);
        return out;
    };

    enum class State : std::uint8_t { unvisited, noise, clustered };
    std::vector<State> state(n, State::unvisited);
    std::vector<std::size_t> label(n, kUnassigned);
    std::size_t next_cluster = 0;

    for (std::size_t i = 0; i < n; ++i) {
        if (state[i] != State::unvisited) continue;
        auto seeds = region(i);
        if (seeds.size() < min_pts) {
            state[i] = State::noise;
            continue;
        }
        const std::size_t cid = next_cluster++;
        state[i] = State::clustered;
        label[i] = cid;
        std::deque<std::size_t> queue(seeds.begin(), seeds.end());
        while (!queue.empty()) {
            const std::size_t q = queue.front();
            queue.pop_front();
            if (state[q] == State::noise) {
                state[q] = State::clustered;
                label[q] = cid;
            }
            if (state[q] != State::unvisited) continue;
            state[q] = State::clustered;
            label[q] = cid;
            auto more = region(q);
            if (more.size() >= min_pts) queue.insert(queue.end(), more.begin(), more.end());
        }
    }
    return collect(label, next_cluster);
}

DbscanResult dbscan(std::span<const GeoPoint> points, double eps_m, std::size_t min_pts,
                    double radius_m, Exec exec) {
    if (min_pts < 1) throw ContractError("min_pts must be >= 1");
    if (!(eps_m > 0.0)) throw ContractError("eps must be positive");
    const std::size_t n = points.size();
    if (n == 0) return {};
    if (!grid_applicable(points)) return dbscan_reference(points, eps_m, min_pts, radius_m);

    const Grid grid = build_grid(points, eps_m, radius_m);
    const auto within = [&](std::size_t a, std::size_t b) {
        return haversine_m(points[a], points[b], radius_m) <= eps_m;
    };

    // Kernel 1: core flags.
    std::vector<std::uint8_t> core(n, 0);
    const auto count_core = [&](std::size_t p) {
        const std::size_t own = grid.cell_of[p];
        std::size_t count = grid.members(own).size();
        if (count >= min_pts) {
            core[p] = 1;
            return;
        }
        for (std::size_t c : grid.nearby[own]) {
            if (c == own) continue;
            for (std::size_t q : grid.members(c)) {
                if (within(p, q) && ++count >= min_pts) {
                    core[p] = 1;
                    return;
                }
            }
        }
    };
    const auto sn = static_cast<std::int64_t>(n);
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 64)
        for (std::int64_t p = 0; p < sn; ++p) count_core(static_cast<std::size_t>(p));
    } else {
        for (std::int64_t p = 0; p < sn; ++p) count_core(static_cast<std::size_t>(p));
    }

    // Connect core points. Cores sharing a cell are always within eps.
    DisjointSet dsu(n);
    std::vector<std::vector<std::size_t>> cell_cores(grid.cell_count());
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        for (std::size_t p : grid.members(c))
            if (core[p]) cell_cores[c].push_back(p);
        for (std::size_t k = 1; k < cell_cores[c].size(); ++k)
            dsu.unite(cell_cores[c][0], cell_cores[c][k]);
    }
    for (std::size_t c1 = 0; c1 < grid.cell_count(); ++c1) {
        if (cell_cores[c1].empty()) continue;
        for (std::size_t c2 : grid.nearby[c1]) {
            if (c2 <= c1 || cell_cores[c2].empty()) continue;
            if (dsu.find(cell_cores[c1][0]) == dsu.find(cell_cores[c2][0])) continue;
            bool linked = false;
            for (std::size_t p : cell_cores[c1]) {
                for (std::size_t q : cell_cores[c2])
                    if (within(p, q)) {
                        linked = true;
                        break;
                    }
                if (linked) break;
            }
            if (linked) dsu.unite(cell_cores[c1][0], cell_cores[c2][0]);
        }
    }

    // Clusters are numbered by their smallest core index, matching the
    // discovery order of the sequential algorithm.
    std::vector<std::size_t> label(n, kUnassigned);
    std::vector<std::size_t> root_cluster(n, kUnassigned);
    std::size_t n_clusters = 0;
    for (std::size_t p = 0; p < n; ++p) {
        if (!core[p]) continue;
        const std::size_t r = dsu.find(p);
        if (root_cluster[r] == kUnassigned) root_cluster[r] = n_clusters++;
        label[p] = root_cluster[r];
    }

    // Kernel 2: border points take the lowest-numbered reachable cluster.
    const auto assign_border = [&](std::size_t p) {
        if (core[p]) return;
        std::size_t best = kUnassigned;
        for (std::size_t c : grid.nearby[grid.cell_of[p]]) {
            if (cell_cores[c].empty()) continue;
            const std::size_t cluster = label[cell_cores[c][0]];
            if (cluster >= best) continue;
            for (std::size_t q : cell_cores[c])
                if (within(p, q)) {
                    best = cluster;
                    break;
                }
        }
        label[p] = best;
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 64)
        for (std::int64_t p = 0; p < sn; ++p) assign_border(static_cast<std::size_t>(p));
    } else {
        for (std::int64_t p = 0; p < sn; ++p) assign_border(static_cast<std::size_t>(p));
    }
    return collect(label, n_clusters);
}

}  // namespace wifitrack
