#include "wifitrack/trace_model.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace wifitrack {

UserId::UserId(std::string_view token) : token_(token) {
    if (token.empty()) throw ContractError("empty user id");
}

std::string BssidId::str() const {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(17, ':');
    for (int octet = 0; octet < 6; ++octet) {
        const auto byte = static_cast<unsigned>((mac_ >> (8 * (5 - octet))) & 0xff);
        out[octet * 3] = kHex[byte >> 4];
        out[octet * 3 + 1] = kHex[byte & 0xf];
    }
    return out;
}

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

BssidId normalize_bssid(std::string_view raw) {
    const auto fail = [&] { return ParseError("malformed BSSID '" + std::string(raw) + "'"); };
    std::uint64_t mac = 0;
    if (raw.size() == 12) {
        for (char c : raw) {
            const int v = hex_value(c);
            if (v < 0) throw fail();
            mac = (mac << 4) | static_cast<std::uint64_t>(v);
        }
        return BssidId(mac);
    }
    if (raw.size() != 17) throw fail();
    const char sep = raw[2];
    if (sep != ':' && sep != '-') throw fail();
    for (std::size_t i = 0; i < 17; ++i) {
        if (i % 3 == 2) {
            if (raw[i] != sep) throw fail();
            continue;
        }
        const int v = hex_value(raw[i]);
        if (v < 0) throw fail();
        mac = (mac << 4) | static_cast<std::uint64_t>(v);
    }
    return BssidId(mac);
}

double wrap_longitude(double lon_deg) {
    double w = std::fmod(lon_deg, 360.0);
    if (w <= -180.0) w += 360.0;
    if (w > 180.0) w -= 360.0;
    return w;
}

GeoPoint::GeoPoint(double lat_deg, double lon_deg) : lat_(lat_deg), lon_(lon_deg) {
    if (!std::isfinite(lat_deg) || !std::isfinite(lon_deg))
        throw ContractError("non-finite coordinate");
    if (lat_deg < -90.0 || lat_deg > 90.0) throw ContractError("latitude out of range");
    if (lon_deg <= -180.0 || lon_deg > 180.0) throw ContractError("longitude out of range");
}

void merge_duplicate_sightings(std::vector<ApSighting>& sightings) {
    if (sightings.size() < 2) return;
    if (sightings.size() <= 32) {
        // Typical scans are short; a quadratic pass avoids hashing.
        std::size_t kept = 0;
        for (std::size_t i = 0; i < sightings.size(); ++i) {
            bool dup = false;
            for (std::size_t j = 0; j < kept && !dup; ++j) dup = sightings[j].bssid == sightings[i].bssid;
            if (!dup) sightings[kept++] = sightings[i];
        }
        sightings.resize(kept);
        return;
    }
    std::unordered_set<BssidId> seen;
    seen.reserve(sightings.size());
    std::erase_if(sightings, [&](const ApSighting& s) { return !seen.insert(s.bssid).second; });
}

namespace {

bool sighting_less(const ApSighting& a, const ApSighting& b) {
    if (a.bssid != b.bssid) return a.bssid < b.bssid;
    if (a.ssid != b.ssid) return a.ssid < b.ssid;
    return a.rssi_dbm < b.rssi_dbm;
}

template <class Record>
std::vector<UserRange> compute_ranges(const std::vector<Record>& records) {
    std::vector<UserRange> ranges;
    for (std::size_t i = 0; i < records.size();) {
        std::size_t j = i + 1;
        while (j < records.size() && records[j].user == records[i].user) ++j;
        ranges.push_back({records[i].user, i, j});
        i = j;
    }
    return ranges;
}

template <class Record>
std::span<const Record> slice_of(const std::vector<Record>& records,
                                 const std::vector<UserRange>& ranges, const UserId& user) {
    const auto it = std::lower_bound(ranges.begin(), ranges.end(), user,
                                     [](const UserRange& r, const UserId& u) { return r.user < u; });
    if (it == ranges.end() || it->user != user) return {};
    return std::span<const Record>(records).subspan(it->begin, it->end - it->begin);
}

}  // namespace

bool fix_less(const GpsFix& a, const GpsFix& b) {
    if (a.user != b.user) return a.user < b.user;
    if (a.ts != b.ts) return a.ts < b.ts;
    if (a.pos != b.pos) return a.pos < b.pos;
    return a.accuracy_m < b.accuracy_m;
}

bool scan_less(const WifiScan& a, const WifiScan& b) {
    if (a.user != b.user) return a.user < b.user;
    if (a.ts != b.ts) return a.ts < b.ts;
    return std::lexicographical_compare(a.sightings.begin(), a.sightings.end(),
                                        b.sightings.begin(), b.sightings.end(), sighting_less);
}

TraceSet::TraceSet(std::vector<GpsFix> fixes, std::vector<WifiScan> scans)
    : fixes_(std::move(fixes)), scans_(std::move(scans)) {
    for (const auto& f : fixes_) {
        if (f.accuracy_m && (!std::isfinite(*f.accuracy_m) || *f.accuracy_m < 0.0))
            throw ContractError("GPS accuracy must be finite and non-negative");
    }
    for (auto& s : scans_) {
        for (const auto& a : s.sightings) {
            if (a.rssi_dbm && (*a.rssi_dbm < -120 || *a.rssi_dbm > 0))
                throw ContractError("RSSI outside [-120, 0] dBm");
        }
        merge_duplicate_sightings(s.sightings);
    }
    if (!std::is_sorted(fixes_.begin(), fixes_.end(), fix_less))
        std::sort(fixes_.begin(), fixes_.end(), fix_less);
    if (!std::is_sorted(scans_.begin(), scans_.end(), scan_less))
        std::sort(scans_.begin(), scans_.end(), scan_less);
    fix_ranges_ = compute_ranges(fixes_);
    scan_ranges_ = compute_ranges(scans_);
}

std::span<const WifiScan> TraceSet::scans_of(const UserId& user) const {
    return slice_of(scans_, scan_ranges_, user);
}

std::span<const GpsFix> TraceSet::fixes_of(const UserId& user) const {
    return slice_of(fixes_, fix_ranges_, user);
}

std::vector<UserId> TraceSet::users() const {
    std::vector<UserId> out;
    out.reserve(fix_ranges_.size() + scan_ranges_.size());
    for (const auto& r : fix_ranges_) out.push_back(r.user);
    for (const auto& r : scan_ranges_) out.push_back(r.user);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::optional<Timestamp> TraceSet::earliest() const {
    std::optional<Timestamp> best;
    const auto consider = [&](Timestamp t) {
        if (!best || t < *best) best = t;
    };
    for (const auto& r : fix_ranges_) consider(fixes_[r.begin].ts);
    for (const auto& r : scan_ranges_) consider(scans_[r.begin].ts);
    return best;
}

}  // namespace wifitrack
