#include "wifitrack/reconstructor.hpp"

#include <algorithm>

#include "wifitrack/csv.hpp"
#include "wifitrack/geometric_median.hpp"

namespace wifitrack {

std::size_t BinnedTimeline::estimated_bins() const {
    return static_cast<std::size_t>(
        std::count_if(bins.begin(), bins.end(), [](const auto& kv) { return kv.second.has_value(); }));
}

std::optional<PositionEstimate> resolve_scan(const WifiScan& scan, const PositionLookup& db,
                                             double radius_m) {
    std::vector<std::pair<BssidId, GeoPoint>> hits;
    for (const auto& s : scan.sightings)
        if (auto p = db.position_at(s.bssid, scan.ts)) hits.emplace_back(s.bssid, *p);
    if (hits.empty()) return std::nullopt;
    std::sort(hits.begin(), hits.end());

    PositionEstimate est{scan.user, scan.ts, hits.front().second, {}};
    std::vector<GeoPoint> pts;
    for (const auto& [b, p] : hits) {
        est.support.push_back(b);
        pts.push_back(p);
    }
    if (pts.size() > 1) est.pos = geometric_median(pts, radius_m);
    return est;
}

BinnedTimeline build_timeline(std::span<const WifiScan> scans, const PositionLookup& db,
                              std::int64_t bin_ms) {
    if (bin_ms <= 0) throw ContractError("bin_ms must be positive");
    BinnedTimeline tl;
    tl.bin_ms = bin_ms;
    if (scans.empty()) return tl;
    tl.user = scans.front().user;
    for (std::size_t i = 0; i < scans.size(); ++i) {
        const auto& scan = scans[i];
        if (scan.user != tl.user) throw ContractError("timeline scans must share one user");
        if (i && scan.ts < scans[i - 1].ts) throw ContractError("timeline scans must be sorted");
        auto& slot = tl.bins[floor_div(scan.ts.ms(), bin_ms)];
        if (!slot) slot = resolve_scan(scan, db);
    }
    return tl;
}

std::vector<BinnedTimeline> build_timelines(const TraceSet& traces, const PositionLookup& db,
                                            std::int64_t bin_ms, Exec exec) {
    const auto ranges = traces.scan_ranges();
    const auto scans = traces.scans();
    std::vector<BinnedTimeline> out(ranges.size());
    const auto work = [&](std::size_t i) {
        out[i] = build_timeline(scans.subspan(ranges[i].begin, ranges[i].end - ranges[i].begin),
                                db, bin_ms);
    };
    const auto n = static_cast<std::int64_t>(ranges.size());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < n; ++i) work(static_cast<std::size_t>(i));
    } else {
        for (std::int64_t i = 0; i < n; ++i) work(static_cast<std::size_t>(i));
    }
    return out;
}

void write_timeline_csv(std::span<const BinnedTimeline> timelines,
                        const std::filesystem::path& path) {
    CsvWriter w(path, {"user", "bin_index", "bin_start_ms", "lat", "lon", "support_count"});
    for (const auto& tl : timelines) {
        for (const auto& [bin, est] : tl.bins) {
            if (est)
                w.row({tl.user.str(), std::to_string(bin), std::to_string(bin * tl.bin_ms),
                       format_double(est->pos.lat()), format_double(est->pos.lon()),
                       std::to_string(est->support.size())});
            else
                w.row({tl.user.str(), std::to_string(bin), std::to_string(bin * tl.bin_ms), "", "",
                       "0"});
        }
    }
    w.close();
}

}  // namespace wifitrack
