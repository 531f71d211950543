#include <gtest/gtest.h>

#include "test_support.hpp"
#include "wifitrack/ap_locator.hpp"
#include "wifitrack/apdb_io.hpp"
#include "wifitrack/random.hpp"

using namespace wifitrack;
using namespace testing_support;

namespace {

PairedObservation ob(std::uint64_t bssid, const GeoPoint& p, std::int64_t ts, const char* user = "u") {
    return {BssidId(bssid), p, Timestamp(ts), UserId(user)};
}

// n sightings around `at` with a few meters of scatter, one per minute from t.
std::vector<PairedObservation> around(std::uint64_t bssid, const GeoPoint& at, std::size_t n, std::int64_t t,
                                      Rng& rng, const char* user = "u") {
    std::vector<PairedObservation> out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(ob(bssid, offset(at, rng.normal(0, 8), rng.normal(0, 8)),
                         t + static_cast<std::int64_t>(i) * kMinuteMs, user));
    return out;
}

}  // namespace

TEST(ClassifyAp, TooFewSightingsIsInsufficient) {
    Rng rng(1, 1);
    const auto obs = around(1, kOrigin, 4, kT0, rng);
    const auto r = classify_ap(BssidId(1), obs);
    EXPECT_TRUE(std::holds_alternative<InsufficientAp>(r.cls));
    EXPECT_EQ(r.n_sightings, 4u);
}

TEST(ClassifyAp, OneTightClusterIsStaticNearTheTruth) {
    Rng rng(1, 2);
    const auto obs = around(1, kOrigin, 40, kT0, rng);
    const auto r = classify_ap(BssidId(1), obs);
    ASSERT_TRUE(std::holds_alternative<StaticAp>(r.cls));
    EXPECT_LT(haversine_m(std::get<StaticAp>(r.cls).pos, kOrigin), 5.0);
    EXPECT_EQ(r.position_at(Timestamp(0)), std::get<StaticAp>(r.cls).pos);
}

TEST(ClassifyAp, ScatteredSightingsAreMobile) {
    std::vector<PairedObservation> obs;
    for (int i = 0; i < 20; ++i) obs.push_back(ob(1, offset(kOrigin, i * 300.0, 0), kT0 + i * kMinuteMs));
    EXPECT_TRUE(std::holds_alternative<MobileAp>(classify_ap(BssidId(1), obs).cls));
}

TEST(ClassifyAp, ClusteredShareThresholdIsInclusive) {
    Rng rng(3, 3);
    // 19 clustered + 1 stray = 95% clustered -> still static.
    auto obs = around(1, kOrigin, 19, kT0, rng);
    obs.push_back(ob(1, offset(kOrigin, 5000, 0), kT0 + kDayMs));
    EXPECT_TRUE(std::holds_alternative<StaticAp>(classify_ap(BssidId(1), obs).cls));
    // 18 + 2 = 90% -> mobile.
    obs.erase(obs.begin());
    obs.push_back(ob(1, offset(kOrigin, -5000, 0), kT0 + 2 * kDayMs));
    EXPECT_TRUE(std::holds_alternative<MobileAp>(classify_ap(BssidId(1), obs).cls));
}

TEST(ClassifyAp, DisjointClustersInTimeAreRelocated) {
    Rng rng(4, 4);
    const GeoPoint b = offset(kOrigin, 2000, 0);
    auto obs = around(1, kOrigin, 10, kT0, rng);
    const auto later = around(1, b, 10, kT0 + 5 * kDayMs, rng);
    obs.insert(obs.end(), later.begin(), later.end());
    const auto r = classify_ap(BssidId(1), obs);
    ASSERT_TRUE(std::holds_alternative<RelocatedAp>(r.cls));
    const auto& segs = std::get<RelocatedAp>(r.cls).segments;
    ASSERT_EQ(segs.size(), 2u);
    EXPECT_LT(segs[0].interval.end, segs[1].interval.start);
    EXPECT_LT(haversine_m(segs[0].pos, kOrigin), 10.0);
    EXPECT_LT(haversine_m(segs[1].pos, b), 10.0);
    EXPECT_TRUE(r.position_at(Timestamp(kT0 + 2 * kMinuteMs)));
    EXPECT_FALSE(r.position_at(Timestamp(kT0 + 2 * kDayMs)));  // between segments
    EXPECT_LT(haversine_m(*r.position_at(Timestamp(kT0 + 5 * kDayMs)), b), 10.0);
}

TEST(ClassifyAp, InterleavedClustersAreMobile) {
    Rng rng(5, 5);
    const GeoPoint b = offset(kOrigin, 2000, 0);
    std::vector<PairedObservation> obs;
    for (int day = 0; day < 10; ++day) {
        obs.push_back(ob(1, offset(kOrigin, rng.normal(0, 5), rng.normal(0, 5)), kT0 + day * kDayMs));
        obs.push_back(ob(1, offset(b, rng.normal(0, 5), rng.normal(0, 5)), kT0 + day * kDayMs + 9 * 3600'000));
    }
    EXPECT_TRUE(std::holds_alternative<MobileAp>(classify_ap(BssidId(1), obs).cls));
}

TEST(ClassifyAp, InputOrderDoesNotMatter) {
    Rng rng(6, 6);
    auto obs = around(1, kOrigin, 30, kT0, rng);
    auto more = around(1, offset(kOrigin, 150, 0), 30, kT0 + kDayMs, rng);
    obs.insert(obs.end(), more.begin(), more.end());
    const auto a = classify_ap(BssidId(1), obs);
    for (int k = 0; k < 5; ++k) {
        for (std::size_t i = obs.size(); i > 1; --i) std::swap(obs[i - 1], obs[rng.below(i)]);
        EXPECT_EQ(classify_ap(BssidId(1), obs), a);
    }
}

TEST(ClassifyAp, ContributorsAreDistinctUsers) {
    Rng rng(7, 7);
    auto obs = around(1, kOrigin, 5, kT0, rng, "a");
    auto more = around(1, kOrigin, 5, kT0 + kDayMs, rng, "b");
    obs.insert(obs.end(), more.begin(), more.end());
    const auto r = classify_ap(BssidId(1), obs);
    EXPECT_EQ(r.contributor_count, 2u);
    EXPECT_EQ(r.contributors.size(), 2u);
}

TEST(ClassifyAp, RejectsForeignObservations) {
    const std::vector<PairedObservation> obs{ob(2, kOrigin, kT0)};
    EXPECT_THROW(classify_ap(BssidId(1), obs), ContractError);
}

TEST(BuildDatabase, OneRecordPerBssidSortedAndSerialEqualsParallel) {
    Rng rng(8, 8);
    std::vector<PairedObservation> obs;
    for (std::uint64_t b = 50; b > 0; --b) {
        const auto part = around(b, offset(kOrigin, rng.uniform(-3000, 3000), rng.uniform(-3000, 3000)),
                                 rng.below(12), kT0, rng);
        obs.insert(obs.end(), part.begin(), part.end());
    }
    const auto db = build_database(obs, {}, Exec::parallel);
    EXPECT_EQ(db, build_database(obs, {}, Exec::serial));
    for (std::size_t i = 1; i < db.size(); ++i) EXPECT_LT(db.records()[i - 1].bssid, db.records()[i].bssid);
    const auto c = db.census();
    EXPECT_EQ(c.total, db.size());
    EXPECT_EQ(c.located_static + c.relocated + c.mobile + c.insufficient, c.total);
    EXPECT_EQ(db.find(BssidId(999)), nullptr);
    EXPECT_FALSE(db.position_at(BssidId(999), Timestamp(kT0)));
}

TEST(BuildDatabase, ShuffledInputGivesTheSameDatabase) {
    Rng rng(9, 9);
    std::vector<PairedObservation> obs;
    for (std::uint64_t b = 1; b <= 30; ++b) {
        const auto part = around(b, offset(kOrigin, rng.uniform(-3000, 3000), 0), 3 + rng.below(10), kT0, rng);
        obs.insert(obs.end(), part.begin(), part.end());
    }
    const auto db = build_database(obs);
    for (std::size_t i = obs.size(); i > 1; --i) std::swap(obs[i - 1], obs[rng.below(i)]);
    EXPECT_EQ(build_database(obs), db);
}

TEST(BuildDatabase, RejectsInvalidConfig) {
    LocatorConfig cfg;
    cfg.clustered_fraction_min = 1.5;
    EXPECT_THROW(build_database({}, cfg), ContractError);
}

TEST(ApDatabase, DuplicateRecordsRejected) {
    ApRecord r;
    r.bssid = BssidId(1);
    r.cls = MobileAp{};
    EXPECT_THROW(ApDatabase({r, r}, "x"), ContractError);
}

TEST(UnionLookup, FirstLayerWins) {
    ApRecord a;
    a.bssid = BssidId(1);
    a.cls = StaticAp{kOrigin, 5};
    ApRecord b = a;
    b.cls = StaticAp{offset(kOrigin, 100, 0), 5};
    ApRecord c;
    c.bssid = BssidId(2);
    c.cls = StaticAp{kOrigin, 5};
    const ApDatabase first({a}, "first"), second({b, c}, "second");
    const UnionLookup u({&first, &second});
    EXPECT_EQ(u.position_at(BssidId(1), Timestamp(0)), kOrigin);
    EXPECT_EQ(u.position_at(BssidId(2), Timestamp(0)), kOrigin);
    EXPECT_FALSE(u.position_at(BssidId(3), Timestamp(0)));
}

TEST(NamedSsids, CountsByOutcome) {
    ApRecord mob;
    mob.bssid = BssidId(1);
    mob.cls = MobileAp{};
    ApRecord stat;
    stat.bssid = BssidId(2);
    stat.cls = StaticAp{kOrigin, 5};
    const ApDatabase db({mob, stat}, "x");
    WifiScan s{UserId("u"), Timestamp(kT0), {{BssidId(1), Ssid("AndroidAP"), std::nullopt},
                                             {BssidId(2), Ssid("iPhone"), std::nullopt},
                                             {BssidId(3), Ssid("Commutenet"), std::nullopt},
                                             {BssidId(4), Ssid("home"), std::nullopt}}};
    const auto v = validate_against_named_ssids(db, std::vector<WifiScan>{s}, default_mobile_ssids());
    EXPECT_EQ(v.candidates, 3u);
    EXPECT_EQ(v.mobile, 1u);
    EXPECT_EQ(v.located, 1u);
    EXPECT_EQ(v.absent, 1u);
    EXPECT_DOUBLE_EQ(*v.recall(), 0.5);
    EXPECT_THROW(validate_against_named_ssids(db, {}, {}), ContractError);
}

TEST(ApdbCsv, RoundTrip) {
    Rng rng(10, 10);
    auto obs = around(1, kOrigin, 10, kT0, rng);
    auto later = around(1, offset(kOrigin, 3000, 0), 10, kT0 + 3 * kDayMs, rng);
    obs.insert(obs.end(), later.begin(), later.end());
    auto st = around(2, offset(kOrigin, 0, 700), 12, kT0, rng);
    obs.insert(obs.end(), st.begin(), st.end());
    obs.push_back(ob(3, kOrigin, kT0));
    for (int i = 0; i < 10; ++i) obs.push_back(ob(4, offset(kOrigin, i * 500.0, 0), kT0 + i));
    const auto db = build_database(obs);
    ASSERT_EQ(db.census().relocated, 1u);
    TempDir dir;
    write_apdb_csv(db, dir / "apdb.csv");
    const auto back = read_apdb_csv(dir / "apdb.csv");
    ASSERT_EQ(back.size(), db.size());
    for (std::size_t i = 0; i < db.size(); ++i) {
        const auto& a = db.records()[i];
        const auto& b = back.records()[i];
        EXPECT_EQ(a.bssid, b.bssid);
        EXPECT_EQ(a.cls, b.cls);
        EXPECT_EQ(a.n_sightings, b.n_sightings);
        EXPECT_EQ(a.contributor_count, b.contributor_count);
    }
    write_apdb_csv(back, dir / "again.csv");
    EXPECT_EQ(slurp(dir / "apdb.csv"), slurp(dir / "again.csv"));
}

TEST(ApdbCsv, MalformedRowsAreParseErrors) {
    TempDir dir;
    spit(dir / "a.csv", "bssid,class,lat,lon,n_sightings,segments_json,contributors_count\n"
                        "00:00:00:00:00:01,static,,,5,,1\n");
    EXPECT_THROW(read_apdb_csv(dir / "a.csv"), ParseError);
    spit(dir / "b.csv", "bssid,class,lat,lon,n_sightings,segments_json,contributors_count\n"
                        "00:00:00:00:00:01,relocated,,,5,[{\"lat\":1}],1\n");
    EXPECT_THROW(read_apdb_csv(dir / "b.csv"), ParseError);
    spit(dir / "c.csv", "bssid,class,lat,lon,n_sightings,segments_json,contributors_count\n"
                        "00:00:00:00:00:01,weird,,,5,,1\n");
    EXPECT_THROW(read_apdb_csv(dir / "c.csv"), ParseError);
}
