#include "wifitrack/pairing.hpp"

#include <algorithm>

#include "wifitrack/csv.hpp"

namespace wifitrack {

bool observation_less(const PairedObservation& a, const PairedObservation& b) {
    if (a.bssid != b.bssid) return a.bssid < b.bssid;
    if (a.ts != b.ts) return a.ts < b.ts;
    if (a.user != b.user) return a.user < b.user;
    return a.pos < b.pos;
}

void PairingConfig::validate() const {
    if (window_ms <= 0) throw ContractError("pairing window must be positive");
    if (max_accuracy_m && !(*max_accuracy_m >= 0.0))
        throw ContractError("max accuracy must be non-negative");
}

std::optional<std::size_t> nearest_scan(std::span<const WifiScan> scans, Timestamp t,
                                        std::int64_t window_ms) {
    const std::int64_t lo = t.ms() - window_ms;
    const std::int64_t hi = t.ms() + window_ms;
    auto it = std::lower_bound(scans.begin(), scans.end(), lo,
                               [](const WifiScan& s, std::int64_t v) { return s.ts.ms() < v; });
    std::optional<std::size_t> best;
    std::int64_t best_dt = 0;
    for (; it != scans.end() && it->ts.ms() <= hi; ++it) {
        const std::int64_t dt = std::abs(it->ts.ms() - t.ms());
        // Strict comparison keeps the earliest scan on ties.
        if (!best || dt < best_dt) {
            best = static_cast<std::size_t>(it - scans.begin());
            best_dt = dt;
        }
    }
    return best;
}

namespace {

void pair_user(std::span<const GpsFix> fixes, std::span<const WifiScan> scans,
               const PairingConfig& cfg, std::vector<PairedObservation>& out) {
    for (const auto& fix : fixes) {
        if (cfg.max_accuracy_m && fix.accuracy_m && *fix.accuracy_m > *cfg.max_accuracy_m)
            continue;
        const auto idx = nearest_scan(scans, fix.ts, cfg.window_ms);
        if (!idx) continue;
        for (const auto& s : scans[*idx].sightings)
            out.push_back({s.bssid, fix.pos, fix.ts, fix.user});
    }
}

}  // namespace

std::vector<PairedObservation> pair_observations(const TraceSet& traces, const PairingConfig& cfg,
                                                 Exec exec) {
    cfg.validate();
    const auto ranges = traces.fix_ranges();
    const auto fixes = traces.fixes();
    std::vector<std::vector<PairedObservation>> per_user(ranges.size());

    const auto work = [&](std::size_t i) {
        const auto& r = ranges[i];
        pair_user(fixes.subspan(r.begin, r.end - r.begin), traces.scans_of(r.user), cfg,
                  per_user[i]);
    };
    const auto n = static_cast<std::int64_t>(ranges.size());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < n; ++i) work(static_cast<std::size_t>(i));
    } else {
        for (std::int64_t i = 0; i < n; ++i) work(static_cast<std::size_t>(i));
    }

    std::size_t total = 0;
    for (const auto& v : per_user) total += v.size();
    std::vector<PairedObservation> out;
    out.reserve(total);
    for (auto& v : per_user) out.insert(out.end(), v.begin(), v.end());
    std::sort(out.begin(), out.end(), observation_less);
    return out;
}

void write_pairs_csv(std::span<const PairedObservation> obs, const std::filesystem::path& path) {
    CsvWriter w(path, {"bssid", "lat", "lon", "ts_ms", "user"});
    for (const auto& o : obs)
        w.row({o.bssid.str(), format_double(o.pos.lat()), format_double(o.pos.lon()),
               std::to_string(o.ts.ms()), o.user.str()});
    w.close();
}

}  // namespace wifitrack
