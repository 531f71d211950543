#include "wifitrack/ap_locator.hpp"

#include <algorithm>
#include <unordered_set>

#include "wifitrack/dbscan.hpp"
#include "wifitrack/geometric_median.hpp"

namespace wifitrack {

void LocatorConfig::validate() const {
    if (!(eps_m > 0.0)) throw ContractError("eps_m must be positive");
    if (!(clustered_fraction_min > 0.0 && clustered_fraction_min <= 1.0))
        throw ContractError("clustered_fraction_min must be in (0, 1]");
    if (min_cluster_pts < 1) throw ContractError("min_cluster_pts must be >= 1");
    if (!(earth_radius_m > 0.0)) throw ContractError("earth_radius_m must be positive");
}

TimeInterval::TimeInterval(Timestamp s, Timestamp e) : start(s), end(e) {
    if (e < s) throw ContractError("interval end precedes start");
}

const char* class_name(const ApClass& c) {
    struct Visitor {
        const char* operator()(const StaticAp&) const { return "static"; }
        const char* operator()(const RelocatedAp&) const { return "relocated"; }
        const char* operator()(const MobileAp&) const { return "mobile"; }
        const char* operator()(const InsufficientAp&) const { return "insufficient"; }
    };
    return std::visit(Visitor{}, c);
}

std::optional<GeoPoint> ApRecord::position_at(Timestamp t) const {
    if (const auto* s = std::get_if<StaticAp>(&cls)) return s->pos;
    if (const auto* r = std::get_if<RelocatedAp>(&cls)) {
        for (const auto& seg : r->segments)
            if (seg.interval.contains(t)) return seg.pos;
    }
    return std::nullopt;
}

ApDatabase::ApDatabase(std::vector<ApRecord> records, std::string built_from)
    : records_(std::move(records)), built_from_(std::move(built_from)) {
    std::sort(records_.begin(), records_.end(),
              [](const ApRecord& a, const ApRecord& b) { return a.bssid < b.bssid; });
    index_.reserve(records_.size());
    for (std::size_t i = 0; i < records_.size(); ++i) {
        if (!index_.emplace(records_[i].bssid, i).second)
            throw ContractError("duplicate record for " + records_[i].bssid.str());
    }
}

const ApRecord* ApDatabase::find(BssidId bssid) const {
    const auto it = index_.find(bssid);
    return it == index_.end() ? nullptr : &records_[it->second];
}

std::optional<GeoPoint> ApDatabase::position_at(BssidId bssid, Timestamp t) const {
    const auto* r = find(bssid);
    return r ? r->position_at(t) : std::nullopt;
}

Census ApDatabase::census() const {
    Census c;
    c.total = records_.size();
    for (const auto& r : records_) {
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, StaticAp>) ++c.located_static;
                if constexpr (std::is_same_v<T, RelocatedAp>) ++c.relocated;
                if constexpr (std::is_same_v<T, MobileAp>) ++c.mobile;
                if constexpr (std::is_same_v<T, InsufficientAp>) ++c.insufficient;
            },
            r.cls);
    }
    return c;
}

std::optional<GeoPoint> UnionLookup::position_at(BssidId bssid, Timestamp t) const {
    for (const auto* layer : layers_)
        if (auto p = layer->position_at(bssid, t)) return p;
    return std::nullopt;
}

namespace {

bool canonical_obs_less(const PairedObservation& a, const PairedObservation& b) {
    if (a.ts != b.ts) return a.ts < b.ts;
    if (a.user != b.user) return a.user < b.user;
    return a.pos < b.pos;
}

}  // namespace

ApRecord classify_ap(BssidId bssid, std::span<const PairedObservation> obs_in,
                     const LocatorConfig& cfg) {
    ApRecord rec;
    rec.bssid = bssid;
    rec.n_sightings = obs_in.size();
    for (const auto& o : obs_in) {
        if (o.bssid != bssid) throw ContractError("observation for a different BSSID");
        rec.contributors.push_back(o.user);
    }
    std::sort(rec.contributors.begin(), rec.contributors.end());
    rec.contributors.erase(std::unique(rec.contributors.begin(), rec.contributors.end()),
                           rec.contributors.end());
    rec.contributor_count = rec.contributors.size();

    if (obs_in.size() < cfg.min_sightings) {
        rec.cls = InsufficientAp{};
        return rec;
    }

    // A canonical order makes the result independent of input order.
    std::vector<PairedObservation> obs(obs_in.begin(), obs_in.end());
    std::sort(obs.begin(), obs.end(), canonical_obs_less);
    std::vector<GeoPoint> pts;
    pts.reserve(obs.size());
    for (const auto& o : obs) pts.push_back(o.pos);

    // Nested under the per-BSSID parallel loop, so run serially here.
    const auto clusters = dbscan(pts, cfg.eps_m, cfg.min_cluster_pts, cfg.earth_radius_m,
                                 Exec::serial);
    const double clustered = static_cast<double>(obs.size() - clusters.noise.size());
    if (clusters.clusters.empty() ||
        clustered < cfg.clustered_fraction_min * static_cast<double>(obs.size())) {
        rec.cls = MobileAp{};
        return rec;
    }

    const auto median_of = [&](const std::vector<std::size_t>& members) {
        std::vector<GeoPoint> sub;
        sub.reserve(members.size());
        for (std::size_t i : members) sub.push_back(pts[i]);
        return geometric_median(sub, cfg.earth_radius_m);
    };

    if (clusters.clusters.size() == 1) {
        rec.cls = StaticAp{median_of(clusters.clusters.front()), obs.size()};
        return rec;
    }

    std::vector<PositionedSegment> segments;
    for (const auto& members : clusters.clusters) {
        Timestamp lo = obs[members.front()].ts, hi = lo;
        for (std::size_t i : members) {
            lo = std::min(lo, obs[i].ts);
            hi = std::max(hi, obs[i].ts);
        }
        segments.push_back({GeoPoint{}, TimeInterval(lo, hi)});
    }
    for (std::size_t a = 0; a < segments.size(); ++a)
        for (std::size_t b = a + 1; b < segments.size(); ++b)
            if (segments[a].interval.overlaps(segments[b].interval)) {
                rec.cls = MobileAp{};
                return rec;
            }
    for (std::size_t k = 0; k < segments.size(); ++k) segments[k].pos = median_of(clusters.clusters[k]);
    std::sort(segments.begin(), segments.end(), [](const auto& a, const auto& b) {
        return a.interval.start < b.interval.start;
    });
    rec.cls = RelocatedAp{std::move(segments)};
    return rec;
}

ApDatabase build_database(std::span<const PairedObservation> obs, const LocatorConfig& cfg,
                          Exec exec, std::string built_from) {
    cfg.validate();
    std::vector<PairedObservation> sorted;
    std::span<const PairedObservation> grouped = obs;
    if (!std::is_sorted(obs.begin(), obs.end(),
                        [](const auto& a, const auto& b) { return a.bssid < b.bssid; })) {
        sorted.assign(obs.begin(), obs.end());
        std::stable_sort(sorted.begin(), sorted.end(),
                         [](const auto& a, const auto& b) { return a.bssid < b.bssid; });
        grouped = sorted;
    }

    std::vector<std::pair<std::size_t, std::size_t>> groups;
    for (std::size_t i = 0; i < grouped.size();) {
        std::size_t j = i + 1;
        while (j < grouped.size() && grouped[j].bssid == grouped[i].bssid) ++j;
        groups.emplace_back(i, j);
        i = j;
    }

    std::vector<ApRecord> records(groups.size());
    const auto work = [&](std::size_t g) {
        const auto [b, e] = groups[g];
        records[g] = classify_ap(grouped[b].bssid, grouped.subspan(b, e - b), cfg);
    };
    const auto n = static_cast<std::int64_t>(groups.size());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t g = 0; g < n; ++g) work(static_cast<std::size_t>(g));
    } else {
        for (std::int64_t g = 0; g < n; ++g) work(static_cast<std::size_t>(g));
    }
    return ApDatabase(std::move(records), std::move(built_from));
}

std::optional<double> NamedSsidValidation::recall() const {
    const std::size_t classified = mobile + located;
    if (classified == 0) return std::nullopt;
    return static_cast<double>(mobile) / static_cast<double>(classified);
}

NamedSsidValidation validate_against_named_ssids(const ApDatabase& db,
                                                 std::span<const WifiScan> scans,
                                                 const std::set<std::string>& mobile_ssids) {
    if (mobile_ssids.empty()) throw ContractError("no mobile SSIDs given");
    std::unordered_set<Symbol> wanted;
    for (const auto& s : mobile_ssids) wanted.insert(Symbol(s));
    std::set<BssidId> candidates;
    for (const auto& scan : scans)
        for (const auto& s : scan.sightings)
            if (!s.ssid.is_null() && wanted.contains(s.ssid)) candidates.insert(s.bssid);

    NamedSsidValidation v;
    v.candidates = candidates.size();
    for (BssidId b : candidates) {
        const auto* rec = db.find(b);
        if (!rec) {
            ++v.absent;
        } else if (std::holds_alternative<MobileAp>(rec->cls)) {
            ++v.mobile;
        } else if (std::holds_alternative<InsufficientAp>(rec->cls)) {
            ++v.insufficient;
        } else {
            ++v.located;
        }
    }
    return v;
}

std::set<std::string> default_mobile_ssids() {
    return {"AndroidAP", "iPhone", "Bedrebustur", "Commutenet"};
}

}  // namespace wifitrack
