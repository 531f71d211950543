#include <gtest/gtest.h>

#include "test_support.hpp"
#include "wifitrack/config.hpp"
#include "wifitrack/csv.hpp"

using namespace wifitrack;
using namespace testing_support;

TEST(Config, ParsesCommentsBlanksAndWhitespace) {
    const auto c = ConfigFile::parse("# header\n\n eps_m = 80  # tighter\nn_users=4\r\n", "x.cfg");
    ASSERT_EQ(c.entries.size(), 2u);
    EXPECT_EQ(c.entries.at("eps_m").value, "80");
    EXPECT_EQ(c.entries.at("eps_m").line, 3);
    EXPECT_EQ(c.entries.at("n_users").value, "4");
}

TEST(Config, RejectsMalformedLinesAndDuplicates) {
    EXPECT_THROW(ConfigFile::parse("eps_m 80"), ParseError);
    EXPECT_THROW(ConfigFile::parse("= 3"), ParseError);
    try {
        ConfigFile::parse("eps_m=1\neps_m=2\n", "d.cfg");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("d.cfg:2"), std::string::npos);
    }
}

TEST(Config, AppliesOverridesToEveryTarget) {
    PairingConfig p;
    LocatorConfig l;
    WorldSpec w;
    const auto c = ConfigFile::parse(
        "window_ms=500\neps_m=75.5\nmin_sightings=7\nn_days=12\nroutine_change_day=6\n"
        "density_cells=2\ndensity_weights=1, 2,3,4\nseed=99\n");
    apply_config(c, {&p, &l, &w});
    EXPECT_EQ(p.window_ms, 500);
    EXPECT_DOUBLE_EQ(l.eps_m, 75.5);
    EXPECT_EQ(l.min_sightings, 7u);
    EXPECT_EQ(w.n_days, 12);
    EXPECT_EQ(w.routine_change_day, 6);
    EXPECT_EQ(w.density_weights, (std::vector<double>{1, 2, 3, 4}));
    EXPECT_EQ(w.seed, 99u);
    EXPECT_EQ(l.min_cluster_pts, LocatorConfig{}.min_cluster_pts);
}

TEST(Config, UnknownKeysAndBadValuesNameTheLine) {
    LocatorConfig l;
    try {
        apply_config(ConfigFile::parse("eps_m=1\nbogus_key=3\n", "bad.cfg"), {nullptr, &l, nullptr});
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(std::string(e.what()), "bad.cfg:2: unknown key 'bogus_key'");
    }
    EXPECT_THROW(apply_config(ConfigFile::parse("eps_m=abc"), {nullptr, &l, nullptr}), ParseError);
    EXPECT_THROW(apply_config(ConfigFile::parse("eps_m=5m"), {nullptr, &l, nullptr}), ParseError);
    // A world key with no world target.
    EXPECT_THROW(apply_config(ConfigFile::parse("n_users=3"), {nullptr, &l, nullptr}), ParseError);
}

TEST(Config, LoadReadsFiles) {
    TempDir dir;
    spit(dir / "a.cfg", "eps_m = 60\n");
    const auto c = ConfigFile::load(dir / "a.cfg");
    EXPECT_EQ(c.entries.at("eps_m").value, "60");
    EXPECT_THROW(ConfigFile::load(dir / "missing.cfg"), IoError);
}

TEST(Config, KnownKeysAreSortedAndComplete) {
    const auto keys = known_config_keys();
    EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
    for (const char* k : {"window_ms", "eps_m", "clustered_fraction_min", "n_users", "density_weights"})
        EXPECT_NE(std::find(keys.begin(), keys.end(), k), keys.end()) << k;
}
