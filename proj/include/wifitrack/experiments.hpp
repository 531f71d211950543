#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "wifitrack/ap_locator.hpp"
#include "wifitrack/coverage.hpp"
#include "wifitrack/exec.hpp"
#include "wifitrack/pairing.hpp"

namespace wifitrack {

/// Training data from the first `days` days after the dataset start.
struct InitialPeriod {
    std::int64_t days = 7;
    friend bool operator==(const InitialPeriod&, const InitialPeriod&) = default;
};
/// Each GPS fix event is kept with probability f; larger f keeps a superset
/// for the same seed.
struct RandomFraction {
    double f = 1.0;
    std::uint64_t seed = 0;
    friend bool operator==(const RandomFraction&, const RandomFraction&) = default;
};
/// Each user contributes the k routers covering most of their own timebins,
/// positioned by the full-data database.
struct TopRouters {
    std::size_t k = 20;
    friend bool operator==(const TopRouters&, const TopRouters&) = default;
};

using SamplingStrategy = std::variant<InitialPeriod, RandomFraction, TopRouters>;

void validate(const SamplingStrategy& s);
/// "initial", "random" or "top".
const char* strategy_name(const SamplingStrategy& s);
/// The strategy's parameter as text: days, fraction or k.
std::string strategy_param(const SamplingStrategy& s);

enum class Scenario { global, personal, global_excluding_self };
inline constexpr std::array<Scenario, 3> kAllScenarios{Scenario::global, Scenario::personal,
                                                       Scenario::global_excluding_self};
/// "global", "personal" or "global_excluding_self".
const char* scenario_name(Scenario s);
Scenario parse_scenario(std::string_view name);

/// Applies an InitialPeriod or RandomFraction strategy, then keeps the
/// viewer's observations (personal), drops them (global_excluding_self) or
/// keeps everything (global). TopRouters has no observation subset and is
/// rejected, as is a missing viewer for the non-global scenarios.
std::vector<PairedObservation> select_training_pairs(std::span<const PairedObservation> obs,
                                                     const SamplingStrategy& strategy,
                                                     const std::optional<UserId>& viewer,
                                                     Scenario scenario, Timestamp dataset_start);

/// Greedy maximum coverage over (user, timebin) sets using scans only.
/// Ties go to the smaller BSSID; selection continues at zero gain until k
/// routers are chosen or none remain. Output is in selection order.
std::vector<BssidId> greedy_top_routers(std::span<const WifiScan> scans, std::size_t k,
                                        std::int64_t bin_ms = kTenMinutesMs);

/// Number of (user, timebin) pairs in which at least one of `routers` was seen.
std::size_t covered_user_bins(std::span<const WifiScan> scans, std::span<const BssidId> routers,
                              std::int64_t bin_ms = kTenMinutesMs);

/// Per-user coverage histogram on [0, 1] in ten bins of width 0.1; a
/// coverage of exactly 1 falls in the last bin.
using Histogram = std::array<std::size_t, 10>;
inline constexpr double kHistogramWidth = 0.1;

struct ExperimentResult {
    SamplingStrategy strategy;
    Scenario scenario = Scenario::global;
    std::vector<UserDayCoverage> rows;  // ordered by (user, day)
    CoverageSeries series;
    std::map<std::int64_t, Histogram> histograms;

    /// Mean over all user-days with WiFi data; absent if there are none.
    std::optional<double> mean_coverage() const;
    std::optional<Histogram> histogram_at(std::int64_t day) const;
};

Histogram coverage_histogram(std::span<const UserDayCoverage> rows, std::int64_t day);

struct ExperimentOptions {
    std::vector<std::int64_t> histogram_days{7, 80, 190};
    std::int64_t bin_ms = kTenMinutesMs;
};

/// Shared, read-only inputs for a batch of experiments: the traces, their
/// full pairing and the full-data database.
class ExperimentContext {
public:
    ExperimentContext(const TraceSet& traces, const LocatorConfig& locator = {},
                      const PairingConfig& pairing = {}, Exec exec = Exec::parallel);

    const TraceSet& traces() const { return *traces_; }
    std::span<const PairedObservation> observations() const { return obs_; }
    const ApDatabase& full_database() const { return full_db_; }
    const LocatorConfig& locator() const { return locator_; }
    Timestamp dataset_start() const { return start_; }
    std::span<const UserId> users() const { return users_; }
    /// Distinct (user, fix timestamp, position) events among the observations.
    std::size_t paired_events() const { return paired_events_; }
    /// Days from the dataset start to the last record, inclusive.
    std::int64_t span_days() const { return span_days_; }
    Exec exec() const { return exec_; }

    /// Fraction f whose expected kept events equal `per_user_per_day` paired
    /// fixes per user per day.
    double fraction_for_daily_rate(double per_user_per_day) const;

    /// The user's greedy router list of length min(k, routers seen).
    std::vector<BssidId> top_routers(const UserId& user, std::size_t k,
                                     std::int64_t bin_ms = kTenMinutesMs) const;

private:
    const TraceSet* traces_;
    LocatorConfig locator_;
    std::vector<PairedObservation> obs_;
    ApDatabase full_db_;
    Timestamp start_;
    std::vector<UserId> users_;
    std::size_t paired_events_ = 0;
    std::int64_t span_days_ = 0;
    Exec exec_;
};

/// Runs one strategy under all three scenarios, ordered as kAllScenarios.
///
/// Every viewer gets three lookups. Personal: classified from the viewer's own
/// training pairs. Excluding-self: the pooled database with each router the
/// viewer touched reclassified from the others' pairs alone. Global: the
/// pooled database, falling back to the other two, so a router known to any
/// of them is known globally.
std::array<ExperimentResult, 3> run_all_scenarios(const ExperimentContext& ctx,
                                                  const SamplingStrategy& strategy,
                                                  const ExperimentOptions& opts = {});

ExperimentResult run_experiment(const ExperimentContext& ctx, const SamplingStrategy& strategy,
                                Scenario scenario, const ExperimentOptions& opts = {});

/// Runs every strategy; results are ordered by strategy, then scenario.
std::vector<ExperimentResult> run_grid(const ExperimentContext& ctx,
                                       std::span<const SamplingStrategy> strategies,
                                       const ExperimentOptions& opts = {});

struct DeclineOptions {
    std::int64_t early_day = 60;
    std::int64_t late_day = 160;
    std::int64_t histogram_day = 190;
    /// Daily means are averaged over [day - w, day + w].
    std::int64_t smoothing_half_width = 0;
};

struct DeclineStats {
    double early_mean = 0.0;
    double late_mean = 0.0;
    double decline = 0.0;  // early - late
    std::optional<Histogram> terminal_histogram;
};

/// Absent when the series does not reach the late day.
std::optional<DeclineStats> stability_decline(const ExperimentResult& result,
                                              const DeclineOptions& opts = {});

}  // namespace wifitrack
