#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wifitrack/symbol.hpp"

namespace wifitrack {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a caller breaks an operation's precondition.
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr std::int64_t kSecondMs = 1000;
inline constexpr std::int64_t kMinuteMs = 60 * kSecondMs;
inline constexpr std::int64_t kTenMinutesMs = 10 * kMinuteMs;
inline constexpr std::int64_t kDayMs = 24 * 60 * kMinuteMs;

/// Milliseconds since the Unix epoch, UTC. Never negative.
class Timestamp {
public:
    constexpr Timestamp() = default;
    constexpr explicit Timestamp(std::int64_t millis_utc) : ms_(millis_utc) {
        if (millis_utc < 0) throw ContractError("negative timestamp");
    }
    constexpr std::int64_t ms() const { return ms_; }
    friend constexpr auto operator<=>(Timestamp, Timestamp) = default;

private:
    std::int64_t ms_ = 0;
};

/// Floor division that also behaves for the (unused) negative range.
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    const std::int64_t q = a / b;
    return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

class UserId {
public:
    UserId() = default;
    explicit UserId(std::string_view token);
    const std::string& str() const { return token_.str(); }
    Symbol symbol() const { return token_; }
    friend bool operator==(const UserId&, const UserId&) = default;
    friend std::strong_ordering operator<=>(const UserId& a, const UserId& b) {
        return a.token_ <=> b.token_;
    }

private:
    Symbol token_;
};

/// 48-bit hardware address. Stored big-endian in the low 48 bits, so numeric
/// order matches the lexicographic order of the canonical text form.
class BssidId {
public:
    constexpr BssidId() = default;
    constexpr explicit BssidId(std::uint64_t mac) : mac_(mac & 0xffffffffffffULL) {}
    constexpr std::uint64_t value() const { return mac_; }
    /// Canonical "aa:bb:cc:dd:ee:ff".
    std::string str() const;
    friend constexpr auto operator<=>(BssidId, BssidId) = default;

private:
    std::uint64_t mac_ = 0;
};

/// Accepts 12 hex digits, either bare or with ':' / '-' between every octet.
BssidId normalize_bssid(std::string_view raw);

class GeoPoint {
public:
    constexpr GeoPoint() = default;
    /// lat in [-90, 90], lon in (-180, 180]; throws ContractError otherwise.
    GeoPoint(double lat_deg, double lon_deg);
    double lat() const { return lat_; }
    double lon() const { return lon_; }
    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
    friend auto operator<=>(const GeoPoint&, const GeoPoint&) = default;

private:
    double lat_ = 0.0;
    double lon_ = 0.0;
};

/// Wraps any finite longitude into (-180, 180].
double wrap_longitude(double lon_deg);

struct GpsFix {
    UserId user;
    Timestamp ts;
    GeoPoint pos;
    std::optional<double> accuracy_m;

    friend bool operator==(const GpsFix&, const GpsFix&) = default;
};

/// SSIDs are interned; a null symbol means the SSID was not reported.
using Ssid = Symbol;

struct ApSighting {
    BssidId bssid;
    Ssid ssid;
    std::optional<std::int16_t> rssi_dbm;

    friend bool operator==(const ApSighting&, const ApSighting&) = default;
};

struct WifiScan {
    UserId user;
    Timestamp ts;
    std::vector<ApSighting> sightings;

    friend bool operator==(const WifiScan&, const WifiScan&) = default;
};

/// Drops repeated BSSIDs, keeping the first occurrence.
void merge_duplicate_sightings(std::vector<ApSighting>& sightings);

/// Canonical total orders used for sorting ingested records.
bool fix_less(const GpsFix& a, const GpsFix& b);
bool scan_less(const WifiScan& a, const WifiScan& b);

/// Half-open index range of one user's records inside a sorted vector.
struct UserRange {
    UserId user;
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// Sorted, validated GPS fixes and WiFi scans. Immutable once built.
class TraceSet {
public:
    TraceSet() = default;
    TraceSet(std::vector<GpsFix> fixes, std::vector<WifiScan> scans);

    std::span<const GpsFix> fixes() const { return fixes_; }
    std::span<const WifiScan> scans() const { return scans_; }

    std::span<const UserRange> fix_ranges() const { return fix_ranges_; }
    std::span<const UserRange> scan_ranges() const { return scan_ranges_; }

    std::span<const WifiScan> scans_of(const UserId& user) const;
    std::span<const GpsFix> fixes_of(const UserId& user) const;

    /// Sorted union of users appearing in fixes or scans.
    std::vector<UserId> users() const;

    /// Smallest timestamp over all records; absent for an empty set.
    std::optional<Timestamp> earliest() const;

    friend bool operator==(const TraceSet& a, const TraceSet& b) {
        return a.fixes_ == b.fixes_ && a.scans_ == b.scans_;
    }

private:
    std::vector<GpsFix> fixes_;
    std::vector<WifiScan> scans_;
    std::vector<UserRange> fix_ranges_;
    std::vector<UserRange> scan_ranges_;
};

}  // namespace wifitrack

template <>
struct std::hash<wifitrack::UserId> {
    std::size_t operator()(const wifitrack::UserId& u) const noexcept {
        return u.symbol().hash();
    }
};

template <>
struct std::hash<wifitrack::BssidId> {
    std::size_t operator()(wifitrack::BssidId b) const noexcept {
        return std::hash<std::uint64_t>{}(b.value());
    }
};
