#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "wifitrack/exec.hpp"
#include "wifitrack/geo.hpp"
#include "wifitrack/pairing.hpp"

namespace wifitrack {

struct LocatorConfig {
    double eps_m = 100.0;
    std::size_t min_sightings = 5;
    std::size_t min_cluster_pts = 5;
    double clustered_fraction_min = 0.95;
    double earth_radius_m = kEarthRadiusM;

    void validate() const;
};

struct TimeInterval {
    Timestamp start;
    Timestamp end;

    TimeInterval() = default;
    TimeInterval(Timestamp s, Timestamp e);
    bool contains(Timestamp t) const { return start <= t && t <= end; }
    bool overlaps(const TimeInterval& o) const { return start <= o.end && o.start <= end; }
    friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

struct PositionedSegment {
    GeoPoint pos;
    TimeInterval interval;
    friend bool operator==(const PositionedSegment&, const PositionedSegment&) = default;
};

struct StaticAp {
    GeoPoint pos;
    std::size_t n = 0;
    friend bool operator==(const StaticAp&, const StaticAp&) = default;
};
/// Moved during the observation window; segments ordered by start, pairwise
/// disjoint in time.
struct RelocatedAp {
    std::vector<PositionedSegment> segments;
    friend bool operator==(const RelocatedAp&, const RelocatedAp&) = default;
};
struct MobileAp {
    friend bool operator==(const MobileAp&, const MobileAp&) = default;
};
struct InsufficientAp {
    friend bool operator==(const InsufficientAp&, const InsufficientAp&) = default;
};

using ApClass = std::variant<StaticAp, RelocatedAp, MobileAp, InsufficientAp>;

/// "static", "relocated", "mobile" or "insufficient".
const char* class_name(const ApClass& c);

struct ApRecord {
    BssidId bssid;
    ApClass cls;
    std::size_t n_sightings = 0;
    /// Sorted. May be empty for records loaded from CSV, which only keep the
    /// count.
    std::vector<UserId> contributors;
    std::size_t contributor_count = 0;

    /// Position valid at `t`: static always, relocated within a segment.
    std::optional<GeoPoint> position_at(Timestamp t) const;

    friend bool operator==(const ApRecord&, const ApRecord&) = default;
};

/// Anything that can answer "where was this AP at time t".
class PositionLookup {
public:
    virtual ~PositionLookup() = default;
    virtual std::optional<GeoPoint> position_at(BssidId bssid, Timestamp t) const = 0;
};

struct Census {
    std::size_t total = 0;
    std::size_t located_static = 0;
    std::size_t relocated = 0;
    std::size_t mobile = 0;
    std::size_t insufficient = 0;
};

/// One record per BSSID, sorted by BSSID. Frozen after construction.
class ApDatabase : public PositionLookup {
public:
    ApDatabase() = default;
    ApDatabase(std::vector<ApRecord> records, std::string built_from);

    /// nullptr for a BSSID never seen in training data.
    const ApRecord* find(BssidId bssid) const;
    std::optional<GeoPoint> position_at(BssidId bssid, Timestamp t) const override;

    std::span<const ApRecord> records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    const std::string& built_from() const { return built_from_; }
    Census census() const;

    friend bool operator==(const ApDatabase& a, const ApDatabase& b) {
        return a.records_ == b.records_;
    }

private:
    std::vector<ApRecord> records_;
    std::unordered_map<BssidId, std::size_t> index_;
    std::string built_from_;
};

/// First layer that can place the AP at t wins. Layers are borrowed.
class UnionLookup : public PositionLookup {
public:
    explicit UnionLookup(std::vector<const PositionLookup*> layers) : layers_(std::move(layers)) {}
    std::optional<GeoPoint> position_at(BssidId bssid, Timestamp t) const override;

private:
    std::vector<const PositionLookup*> layers_;
};

/// Classifies one access point from its paired observations:
/// too few sightings -> insufficient; clustered share below the threshold ->
/// mobile; one cluster -> static at the cluster's geometric median; several
/// clusters with pairwise disjoint time spans -> relocated; otherwise mobile.
ApRecord classify_ap(BssidId bssid, std::span<const PairedObservation> obs,
                     const LocatorConfig& cfg = {});

/// Groups observations by BSSID and classifies each group.
ApDatabase build_database(std::span<const PairedObservation> obs, const LocatorConfig& cfg = {},
                          Exec exec = Exec::parallel, std::string built_from = "all observations");

struct NamedSsidValidation {
    std::size_t candidates = 0;  // BSSIDs seen with a listed SSID
    std::size_t mobile = 0;
    std::size_t located = 0;  // static or relocated
    std::size_t insufficient = 0;
    std::size_t absent = 0;  // never paired, so not in the database
    /// mobile / (mobile + located); absent when nothing was classified.
    std::optional<double> recall() const;
};

/// Checks the mobile heuristic against APs whose SSID names a hotspot or
/// vehicle network.
NamedSsidValidation validate_against_named_ssids(const ApDatabase& db,
                                                 std::span<const WifiScan> scans,
                                                 const std::set<std::string>& mobile_ssids);

/// Default hotspot / transit network names.
std::set<std::string> default_mobile_ssids();

}  // namespace wifitrack
