#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "wifitrack/trace_io.hpp"

using namespace wifitrack;
using namespace testing_support;

TEST(Timestamp, RejectsNegative) { EXPECT_THROW(Timestamp(-1), ContractError); }

TEST(Timestamp, FloorDivisionMatchesMathematicalFloor) {
    EXPECT_EQ(floor_div(7, 2), 3);
    EXPECT_EQ(floor_div(-7, 2), -4);
    EXPECT_EQ(floor_div(-8, 2), -4);
}

TEST(GeoPoint, ValidatesRanges) {
    EXPECT_NO_THROW(GeoPoint(90, 180));
    EXPECT_THROW(GeoPoint(90.0001, 0), ContractError);
    EXPECT_THROW(GeoPoint(0, -180), ContractError);
    EXPECT_THROW(GeoPoint(std::nan(""), 0), ContractError);
}

TEST(GeoPoint, WrapLongitude) {
    EXPECT_DOUBLE_EQ(wrap_longitude(190), -170);
    EXPECT_DOUBLE_EQ(wrap_longitude(-180), 180);
    EXPECT_DOUBLE_EQ(wrap_longitude(540), 180);
    EXPECT_DOUBLE_EQ(wrap_longitude(12.5), 12.5);
}

TEST(Bssid, NormalizesSeparatorsAndCase) {
    const BssidId a = normalize_bssid("AA:bb:CC:01:02:03");
    EXPECT_EQ(a, normalize_bssid("aabbcc010203"));
    EXPECT_EQ(a, normalize_bssid("aa-bb-cc-01-02-03"));
    EXPECT_EQ(a.str(), "aa:bb:cc:01:02:03");
}

TEST(Bssid, RejectsMalformed) {
    for (const char* bad : {"", "aa:bb", "aa:bb:cc:dd:ee:fg", "aabbccddeeff00", "aa:bb-cc:dd:ee:ff",
                            "aa::bb:cc:dd:ee"})
        EXPECT_THROW(normalize_bssid(bad), ParseError) << bad;
}

TEST(Bssid, NumericOrderMatchesTextOrder) {
    const BssidId a = normalize_bssid("0a:00:00:00:00:ff"), b = normalize_bssid("0b:00:00:00:00:00");
    EXPECT_LT(a, b);
    EXPECT_LT(a.str(), b.str());
}

TEST(Symbol, InternsByValue) {
    EXPECT_EQ(Symbol("x"), Symbol(std::string("x")));
    EXPECT_NE(Symbol("x"), Symbol("y"));
    EXPECT_TRUE(Symbol().is_null());
    EXPECT_NE(Symbol(""), Symbol());
    EXPECT_LT(Symbol("a"), Symbol("b"));
}

TEST(Sightings, DuplicatesKeepFirst) {
    std::vector<ApSighting> s{{BssidId(1), Ssid("a"), -50}, {BssidId(2), Ssid(), -60},
                              {BssidId(1), Ssid("b"), -40}};
    merge_duplicate_sightings(s);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[0].ssid, Ssid("a"));
    EXPECT_EQ(s[1].bssid, BssidId(2));
}

TEST(Sightings, LongScansAlsoDeduplicate) {
    std::vector<ApSighting> s;
    for (int rep = 0; rep < 3; ++rep)
        for (std::uint64_t b = 0; b < 40; ++b) s.push_back({BssidId(b), Ssid(), static_cast<std::int16_t>(-rep)});
    merge_duplicate_sightings(s);
    ASSERT_EQ(s.size(), 40u);
    for (const auto& x : s) EXPECT_EQ(x.rssi_dbm, 0);
}

TEST(TraceSet, SortsAndIndexesByUser) {
    std::vector<WifiScan> scans{scan("b", kT0 + 5, {1}), scan("a", kT0 + 9, {2}), scan("a", kT0 + 1, {3})};
    std::vector<GpsFix> fixes{fix("c", kT0 + 3, kOrigin)};
    const TraceSet t(fixes, scans);
    ASSERT_EQ(t.scans().size(), 3u);
    EXPECT_EQ(t.scans()[0].ts.ms(), kT0 + 1);
    EXPECT_EQ(t.scans_of(UserId("a")).size(), 2u);
    EXPECT_EQ(t.scans_of(UserId("zz")).size(), 0u);
    const auto users = t.users();
    ASSERT_EQ(users.size(), 3u);
    EXPECT_EQ(users[0].str(), "a");
    EXPECT_EQ(t.earliest()->ms(), kT0 + 1);
}

TEST(TraceSet, EqualRegardlessOfInputOrder) {
    std::vector<WifiScan> scans{scan("b", kT0 + 5, {1}), scan("a", kT0 + 9, {2, 7}), scan("a", kT0 + 1, {3})};
    std::vector<WifiScan> rev(scans.rbegin(), scans.rend());
    EXPECT_EQ(TraceSet({}, scans), TraceSet({}, rev));
}

TEST(TraceSet, RejectsBadAccuracy) {
    GpsFix f = fix("a", kT0, kOrigin);
    f.accuracy_m = -1;
    EXPECT_THROW(TraceSet({f}, {}), ContractError);
}

TEST(TraceSet, EmptyHasNoEarliest) { EXPECT_FALSE(TraceSet().earliest()); }
