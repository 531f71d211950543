#include <gtest/gtest.h>

#include "test_support.hpp"
#include "wifitrack/csv.hpp"
#include "wifitrack/trace_io.hpp"

using namespace wifitrack;
using namespace testing_support;

TEST(JsonlParse, GpsLine) {
    const auto f = parse_gps_line(R"({"user":"u1","ts_ms":1349049600000,"lat":55.5,"lon":12.25,"acc_m":8})");
    EXPECT_EQ(f.user.str(), "u1");
    EXPECT_EQ(f.ts.ms(), 1349049600000);
    EXPECT_DOUBLE_EQ(f.pos.lat(), 55.5);
    EXPECT_EQ(f.accuracy_m, 8.0);
}

TEST(JsonlParse, GpsLineErrors) {
    for (const char* bad : {R"({"user":"u","ts_ms":1,"lat":91,"lon":0})", R"({"user":"u","ts_ms":-1,"lat":0,"lon":0})",
                            R"({"user":"","ts_ms":1,"lat":0,"lon":0})", R"({"user":"u","ts_ms":1.5,"lat":0,"lon":0})",
                            R"({"user":"u","lat":0,"lon":0})", R"([1,2])", "not json",
                            R"({"user":"u","ts_ms":1,"lat":0,"lon":0,"acc_m":-2})"})
        EXPECT_THROW(parse_gps_line(bad), ParseError) << bad;
}

TEST(JsonlParse, WifiLine) {
    const auto s = parse_wifi_line(
        R"({"user":"u1","ts_ms":5,"aps":[{"bssid":"AA-BB-CC-DD-EE-FF","ssid":"net","rssi":-70},{"bssid":"000000000001"}]})");
    ASSERT_EQ(s.sightings.size(), 2u);
    EXPECT_EQ(s.sightings[0].bssid.str(), "aa:bb:cc:dd:ee:ff");
    EXPECT_EQ(s.sightings[0].ssid.str(), "net");
    EXPECT_EQ(s.sightings[0].rssi_dbm, -70);
    EXPECT_TRUE(s.sightings[1].ssid.is_null());
    EXPECT_FALSE(s.sightings[1].rssi_dbm);
}

TEST(JsonlParse, EmptyScanIsValid) {
    EXPECT_TRUE(parse_wifi_line(R"({"user":"u","ts_ms":5,"aps":[]})").sightings.empty());
}

TEST(JsonlParse, WifiLineErrors) {
    for (const char* bad : {R"({"user":"u","ts_ms":5})", R"({"user":"u","ts_ms":5,"aps":[{"bssid":"zz"}]})",
                            R"({"user":"u","ts_ms":5,"aps":[{"bssid":"000000000001","rssi":5}]})",
                            R"({"user":"u","ts_ms":5,"aps":[{"bssid":"000000000001","ssid":3}]})",
                            R"({"user":"u","ts_ms":5,"aps":{}})"})
        EXPECT_THROW(parse_wifi_line(bad), ParseError) << bad;
}

TEST(JsonlFormat, RoundTripsThroughParser) {
    GpsFix f = fix("u\"q", kT0, GeoPoint(55.123456789, -0.1));
    f.accuracy_m = 12.5;
    EXPECT_EQ(parse_gps_line(format_gps_line(f)), f);
    WifiScan s{UserId("u"), Timestamp(kT0), {{BssidId(0xa1), Ssid("café"), -40}, {BssidId(2), Ssid(), std::nullopt}}};
    EXPECT_EQ(parse_wifi_line(format_wifi_line(s)), s);
}

TEST(Ingest, CountsOneMalformedLineAndKeepsTheRest) {
    TempDir dir;
    spit(dir / "gps.jsonl", R"({"user":"u","ts_ms":1,"lat":1,"lon":1})" "\n\n{broken\n");
    spit(dir / "wifi.jsonl", R"({"user":"u","ts_ms":1,"aps":[]})" "\r\n");
    const auto r = ingest_traces(dir / "gps.jsonl", dir / "wifi.jsonl");
    EXPECT_EQ(r.report.gps.records, 1u);
    EXPECT_EQ(r.report.gps.malformed, 1u);
    EXPECT_EQ(r.report.wifi.records, 1u);
    ASSERT_EQ(r.report.gps.samples.size(), 1u);
    EXPECT_NE(r.report.gps.samples[0].find("gps.jsonl:3"), std::string::npos);
}

TEST(Ingest, TooManyMalformedLinesAbort) {
    TempDir dir;
    spit(dir / "gps.jsonl", "x\ny\n" R"({"user":"u","ts_ms":1,"lat":1,"lon":1})" "\n");
    spit(dir / "wifi.jsonl", "");
    EXPECT_THROW(ingest_traces(dir / "gps.jsonl", dir / "wifi.jsonl"), ParseError);
}

TEST(Ingest, MissingFileIsAnIoError) {
    TempDir dir;
    EXPECT_THROW(ingest_traces(dir / "nope.jsonl", dir / "nope2.jsonl"), IoError);
}

TEST(Ingest, WriteThenReadIsIdentity) {
    TempDir dir;
    std::vector<GpsFix> fixes{fix("b", kT0 + 10, GeoPoint(1.5, 2.5)), fix("a", kT0, GeoPoint(-3.25, 179.5))};
    std::vector<WifiScan> scans{scan("a", kT0 + 3, {5, 6}), scan("b", kT0, {})};
    const TraceSet t(fixes, scans);
    write_traces(t, dir / "g.jsonl", dir / "w.jsonl");
    const auto r = ingest_traces(dir / "g.jsonl", dir / "w.jsonl");
    EXPECT_EQ(r.traces, t);
}

TEST(Csv, EscapeAndParse) {
    EXPECT_EQ(csv_escape("plain"), "plain");
    EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    const auto f = parse_csv_line(R"(x,"a,b","say ""hi""",)");
    ASSERT_EQ(f.size(), 4u);
    EXPECT_EQ(f[1], "a,b");
    EXPECT_EQ(f[2], "say \"hi\"");
    EXPECT_EQ(f[3], "");
}

TEST(Csv, DoubleFormattingRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, 55.6761, -12.5683, 1e-7, 123456789.125})
        EXPECT_EQ(parse_double(format_double(v)), v);
    EXPECT_EQ(format_fixed(0.25, 1), "0.2");
    EXPECT_EQ(format_fixed(0.35, 1).size(), 3u);
}
