#include <gtest/gtest.h>

#include <cstdlib>
#include <sys/wait.h>

#include "test_support.hpp"

using namespace testing_support;

namespace {

// Runs the CLI with stdout and stderr discarded; returns the exit status.
int run(const std::string& args) {
    const std::string cmd = std::string("\"") + WIFITRACK_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run(""), 2);
    EXPECT_EQ(run("frobnicate"), 2);
    EXPECT_EQ(run("synth"), 2);
    EXPECT_EQ(run("synth --out /tmp/x --users 0"), 2);
    EXPECT_EQ(run("--help"), 0);
}

TEST(Cli, RuntimeFailuresExitOne) {
    TempDir dir;
    EXPECT_EQ(run("locate --dataset " + q(dir / "nothing") + " --out " + q(dir / "db.csv")), 1);
    spit(dir / "bad.cfg", "bogus_key = 1\n");
    EXPECT_EQ(run("--config " + q(dir / "bad.cfg") + " synth --out " + q(dir / "d")), 1);
}

TEST(Cli, FullPipelineIsDeterministicAcrossThreadCounts) {
    TempDir dir;
    const auto data = dir / "data";
    ASSERT_EQ(run("--seed 7 synth --out " + q(data) + " --users 4 --days 3 --relocated 1"), 0);
    for (const char* f : {"gps.jsonl", "wifi.jsonl", "truth_aps.csv", "truth_positions.csv"})
        EXPECT_TRUE(std::filesystem::exists(data / f)) << f;

    for (int threads : {1, 3}) {
        const auto out = dir / ("t" + std::to_string(threads));
        std::filesystem::create_directories(out);
        const std::string t = "--threads " + std::to_string(threads) + " ";
        ASSERT_EQ(run(t + "locate --dataset " + q(data) + " --out " + q(out / "apdb.csv")), 0);
        ASSERT_EQ(run(t + "reconstruct --dataset " + q(data) + " --apdb " + q(out / "apdb.csv") + " --out " +
                      q(out / "timeline.csv")),
                  0);
        ASSERT_EQ(run(t + "coverage --dataset " + q(data) + " --apdb " + q(out / "apdb.csv") + " --out " +
                      q(out / "coverage.csv")),
                  0);
        ASSERT_EQ(run(t + "experiment --dataset " + q(data) + " --out-dir " + q(out / "exp") +
                      " --strategy all --initial-days 1 --k 3 --hist-days 0 2 --plots"),
                  0);
        ASSERT_EQ(run(t + "evaluate --dataset " + q(data) + " --apdb " + q(out / "apdb.csv") + " --timeline " +
                      q(out / "timeline.csv") + " --out " + q(out / "metrics.csv")),
                  0);
    }
    for (const char* f : {"apdb.csv", "timeline.csv", "coverage.csv", "exp/experiment_grid.csv",
                          "exp/coverage.csv", "exp/histograms.csv", "metrics.csv"}) {
        const auto a = slurp(dir / "t1" / f);
        EXPECT_FALSE(a.empty()) << f;
        EXPECT_EQ(a, slurp(dir / "t3" / f)) << f;
    }
}
