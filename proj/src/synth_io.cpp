#include "wifitrack/synth_io.hpp"

#include <algorithm>
#include <cmath>

#include "wifitrack/csv.hpp"
#include "wifitrack/trace_io.hpp"

namespace wifitrack {

namespace {

GeoPoint rounded(const GeoPoint& p) {
    return GeoPoint(std::round(p.lat() * 1e7) / 1e7, wrap_longitude(std::round(p.lon() * 1e7) / 1e7));
}

}  // namespace

std::vector<TruthApRow> truth_ap_rows(const GroundTruth& gt) {
    std::vector<TruthApRow> rows;
    rows.reserve(gt.aps.size());
    for (std::size_t i = 0; i < gt.aps.size(); ++i) {
        const auto& ap = gt.aps[i];
        TruthApRow r{ap.bssid, gt.ap_class(i), std::nullopt, ap.ssid.is_null() ? "" : ap.ssid.str()};
        if (!gt.is_mobile(i)) r.pos = rounded(gt.frame.to_geo(ap.pos));
        rows.push_back(std::move(r));
    }
    std::sort(rows.begin(), rows.end(),
              [](const TruthApRow& a, const TruthApRow& b) { return a.bssid < b.bssid; });
    return rows;
}

TruthTracks truth_tracks(const GroundTruth& gt) {
    TruthTracks out;
    for (std::size_t u = 0; u < gt.users.size(); ++u) {
        auto& track = out[gt.users[u].id];
        for (std::int64_t t = gt.start_ms(); t < gt.end_ms(); t += kMinuteMs)
            track.emplace_back(t, rounded(gt.user_position(u, Timestamp(t))));
    }
    return out;
}

void write_truth_aps_csv(const GroundTruth& gt, const std::filesystem::path& path) {
    CsvWriter w(path, {"bssid", "class", "lat", "lon", "ssid"});
    for (const auto& r : truth_ap_rows(gt))
        w.row({r.bssid.str(), r.cls, r.pos ? format_double(r.pos->lat()) : "",
               r.pos ? format_double(r.pos->lon()) : "", r.ssid});
    w.close();
}

void write_truth_positions_csv(const GroundTruth& gt, const std::filesystem::path& path) {
    CsvWriter w(path, {"user", "ts_ms", "lat", "lon"});
    for (std::size_t u = 0; u < gt.users.size(); ++u) {
        const std::string& id = gt.users[u].id.str();
        for (std::int64_t t = gt.start_ms(); t < gt.end_ms(); t += kMinuteMs) {
            const GeoPoint p = rounded(gt.user_position(u, Timestamp(t)));
            w.row({id, std::to_string(t), format_double(p.lat()), format_double(p.lon())});
        }
    }
    w.close();
}

void write_dataset(const GroundTruth& gt, const TraceSet& traces,
                   const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_traces(traces, dir / "gps.jsonl", dir / "wifi.jsonl");
    write_truth_aps_csv(gt, dir / "truth_aps.csv");
    write_truth_positions_csv(gt, dir / "truth_positions.csv");
}

std::vector<TruthApRow> read_truth_aps_csv(const std::filesystem::path& path) {
    const auto t = CsvTable::read(path);
    const auto cb = t.column("bssid"), cc = t.column("class"), clat = t.column("lat"),
               clon = t.column("lon"), cs = t.column("ssid");
    std::vector<TruthApRow> rows;
    for (const auto& r : t.rows()) {
        TruthApRow row{normalize_bssid(r[cb]), r[cc], std::nullopt, r[cs]};
        if (row.cls != "static" && row.cls != "relocated" && row.cls != "mobile")
            throw ParseError("unknown truth class '" + row.cls + "' in " + path.string());
        if (!r[clat].empty()) row.pos = GeoPoint(parse_double(r[clat]), parse_double(r[clon]));
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(),
              [](const TruthApRow& a, const TruthApRow& b) { return a.bssid < b.bssid; });
    return rows;
}

TruthTracks read_truth_positions_csv(const std::filesystem::path& path) {
    const auto t = CsvTable::read(path);
    const auto cu = t.column("user"), ct = t.column("ts_ms"), clat = t.column("lat"),
               clon = t.column("lon");
    TruthTracks out;
    for (const auto& r : t.rows())
        out[UserId(r[cu])].emplace_back(parse_int(r[ct]),
                                        GeoPoint(parse_double(r[clat]), parse_double(r[clon])));
    for (auto& [u, track] : out) std::sort(track.begin(), track.end());
    return out;
}

}  // namespace wifitrack
