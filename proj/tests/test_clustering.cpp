#include <gtest/gtest.h>

#include <algorithm>

#include "oracles/brute_dbscan.hpp"
#include "oracles/grid_median.hpp"
#include "test_support.hpp"
#include "wifitrack/dbscan.hpp"
#include "wifitrack/geometric_median.hpp"
#include "wifitrack/random.hpp"

using namespace wifitrack;
using namespace testing_support;

namespace {

std::vector<GeoPoint> blobs(Rng& rng, std::size_t n, double spread_m, const GeoPoint& at = kOrigin) {
    std::vector<GeoPoint> centres;
    const auto k = 1 + rng.below(4);
    for (std::uint64_t i = 0; i < k; ++i)
        centres.push_back(offset(at, rng.uniform(-spread_m, spread_m), rng.uniform(-spread_m, spread_m)));
    std::vector<GeoPoint> pts;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = centres[rng.below(centres.size())];
        const double s = rng.bernoulli(0.2) ? spread_m : 60.0;
        pts.push_back(offset(c, rng.normal(0, s), rng.normal(0, s)));
    }
    return pts;
}

std::vector<oracle::LatLon> to_oracle(const std::vector<GeoPoint>& pts) {
    std::vector<oracle::LatLon> out;
    for (const auto& p : pts) out.push_back({p.lat(), p.lon()});
    return out;
}

}  // namespace

TEST(Dbscan, EmptyInput) {
    const auto r = dbscan({}, 100, 5);
    EXPECT_TRUE(r.clusters.empty());
    EXPECT_TRUE(r.noise.empty());
}

TEST(Dbscan, SinglePointWithMinPtsOneIsACluster) {
    const std::vector<GeoPoint> p{kOrigin};
    EXPECT_EQ(dbscan(p, 100, 1).clusters.size(), 1u);
    EXPECT_EQ(dbscan(p, 100, 2).noise.size(), 1u);
}

TEST(Dbscan, TwoSeparatedGroups) {
    std::vector<GeoPoint> pts;
    for (int i = 0; i < 5; ++i) pts.push_back(offset(kOrigin, i * 10.0, 0));
    for (int i = 0; i < 5; ++i) pts.push_back(offset(kOrigin, 1000 + i * 10.0, 0));
    pts.push_back(offset(kOrigin, 500, 500));
    const auto r = dbscan(pts, 100, 5);
    ASSERT_EQ(r.clusters.size(), 2u);
    EXPECT_EQ(r.clusters[0], (std::vector<std::size_t>{0, 1, 2, 3, 4}));
    EXPECT_EQ(r.noise, (std::vector<std::size_t>{10}));
}

TEST(Dbscan, RejectsBadParameters) {
    const std::vector<GeoPoint> p{kOrigin};
    EXPECT_THROW(dbscan(p, 0, 5), ContractError);
    EXPECT_THROW(dbscan(p, 100, 0), ContractError);
}

TEST(Dbscan, MatchesBruteForceOracle) {
    Rng rng(2024, 1);
    for (int inst = 0; inst < 100; ++inst) {
        const auto n = 1 + rng.below(200);
        const double spread = rng.uniform(50, 800);
        const auto pts = blobs(rng, n, spread);
        const std::size_t min_pts = 1 + rng.below(8);
        const auto got = dbscan(pts, 100, min_pts);
        const auto want = oracle::brute_dbscan(to_oracle(pts), 100, min_pts);
        EXPECT_EQ(oracle::as_sets(got.clusters), oracle::as_sets(want.clusters)) << "instance " << inst;
        EXPECT_EQ(got.noise, want.noise) << "instance " << inst;
        EXPECT_EQ(got, dbscan_reference(pts, 100, min_pts)) << "instance " << inst;
    }
}

TEST(Dbscan, WideAndPolarInputsUseTheExactPath) {
    Rng rng(5, 5);
    for (const GeoPoint& at : {GeoPoint(80.0, 10.0), GeoPoint(-85.0, 179.99), GeoPoint(0.0, 179.999)}) {
        auto pts = blobs(rng, 80, 300, at);
        const auto got = dbscan(pts, 100, 4);
        const auto want = oracle::brute_dbscan(to_oracle(pts), 100, 4);
        EXPECT_EQ(oracle::as_sets(got.clusters), oracle::as_sets(want.clusters));
        EXPECT_EQ(got.noise, want.noise);
    }
}

TEST(Dbscan, PermutationOnlyRelabels) {
    Rng rng(77, 1);
    const auto pts = blobs(rng, 150, 400);
    std::vector<std::size_t> perm(pts.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    std::vector<GeoPoint> shuffled;
    for (auto i : perm) shuffled.push_back(pts[i]);
    const auto a = dbscan(pts, 100, 5);
    const auto b = dbscan(shuffled, 100, 5);
    // Core points and noise are order-free; compare the partition of core
    // points only, since border ties may legitimately move.
    std::set<std::size_t> noise_a(a.noise.begin(), a.noise.end()), noise_b;
    for (auto i : b.noise) noise_b.insert(perm[i]);
    EXPECT_EQ(noise_a, noise_b);
    EXPECT_EQ(a.clusters.size(), b.clusters.size());
}

TEST(Dbscan, ParallelEqualsSerial) {
    Rng rng(3, 3);
    for (int inst = 0; inst < 10; ++inst) {
        const auto pts = blobs(rng, 3000, 1500);
        EXPECT_EQ(dbscan(pts, 100, 5, kEarthRadiusM, Exec::parallel),
                  dbscan(pts, 100, 5, kEarthRadiusM, Exec::serial));
    }
}

TEST(GeometricMedian, SmallCases) {
    const GeoPoint a = kOrigin, b = offset(kOrigin, 100, 0);
    EXPECT_EQ(geometric_median(std::vector<GeoPoint>{a}), a);
    const auto mid = geometric_median(std::vector<GeoPoint>{a, b});
    EXPECT_NEAR(haversine_m(mid, offset(kOrigin, 50, 0)), 0.0, 1e-6);
    EXPECT_THROW(geometric_median(std::vector<GeoPoint>{}), ContractError);
}

TEST(GeometricMedian, IdenticalPoints) {
    const std::vector<GeoPoint> p(7, kOrigin);
    EXPECT_NEAR(haversine_m(geometric_median(p), kOrigin), 0.0, 1e-6);
}

TEST(GeometricMedian, MajorityAtOnePointWins) {
    // Three of five points coincide: the median is that point.
    const std::vector<GeoPoint> p{kOrigin, kOrigin, kOrigin, offset(kOrigin, 80, 10), offset(kOrigin, -40, 70)};
    EXPECT_LT(haversine_m(geometric_median(p), kOrigin), 0.2);
}

TEST(GeometricMedian, RobustToOutlier) {
    std::vector<GeoPoint> p;
    for (int i = 0; i < 9; ++i) p.push_back(offset(kOrigin, (i % 3) * 2.0, (i / 3) * 2.0));
    p.push_back(offset(kOrigin, 5000, 5000));
    EXPECT_LT(haversine_m(geometric_median(p), offset(kOrigin, 2, 2)), 3.0);
}

TEST(GeometricMedian, MatchesGridSearchOracle) {
    Rng rng(11, 2);
    for (int inst = 0; inst < 50; ++inst) {
        const auto n = 3 + rng.below(18);  // 3..20
        std::vector<GeoPoint> pts;
        for (std::uint64_t i = 0; i < n; ++i)
            pts.push_back(offset(kOrigin, rng.normal(0, 25), rng.normal(0, 25)));
        const auto got = geometric_median(pts);
        const auto want = oracle::grid_median(to_oracle(pts));
        EXPECT_LE(haversine_m(got, GeoPoint(want.lat, want.lon)), 1.0) << "instance " << inst << " n " << n
            << " got cost " << oracle::summed_distance(to_oracle(pts), {got.lat(), got.lon()}) << " grid cost "
            << oracle::summed_distance(to_oracle(pts), want);
    }
}
