#include "wifitrack/experiments.hpp"

#include <algorithm>
#include <bit>
#include <queue>
#include <set>
#include <tuple>

#include "wifitrack/csv.hpp"
#include "wifitrack/random.hpp"

namespace wifitrack {

void validate(const SamplingStrategy& s) {
    if (const auto* p = std::get_if<InitialPeriod>(&s); p && p->days < 1)
        throw ContractError("initial period needs at least one day");
    if (const auto* r = std::get_if<RandomFraction>(&s); r && !(r->f >= 0.0 && r->f <= 1.0))
        throw ContractError("random fraction must be in [0, 1]");
    if (const auto* t = std::get_if<TopRouters>(&s); t && t->k < 1)
        throw ContractError("top routers needs k >= 1");
}

const char* strategy_name(const SamplingStrategy& s) {
    switch (s.index()) {
        case 0: return "initial";
        case 1: return "random";
        default: return "top";
    }
}

std::string strategy_param(const SamplingStrategy& s) {
    if (const auto* p = std::get_if<InitialPeriod>(&s)) return std::to_string(p->days);
    if (const auto* r = std::get_if<RandomFraction>(&s)) return format_double(r->f);
    return std::to_string(std::get<TopRouters>(s).k);
}

const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::global: return "global";
        case Scenario::personal: return "personal";
        case Scenario::global_excluding_self: return "global_excluding_self";
    }
    return "?";
}

Scenario parse_scenario(std::string_view name) {
    for (Scenario s : kAllScenarios)
        if (name == scenario_name(s)) return s;
    throw ParseError("unknown scenario '" + std::string(name) + "'");
}

namespace {

bool keep_event(const PairedObservation& o, const RandomFraction& r) {
    std::uint64_t key = hash_combine(r.seed, hash_string(o.user.str()));
    key = hash_combine(key, static_cast<std::uint64_t>(o.ts.ms()));
    key = hash_combine(key, std::bit_cast<std::uint64_t>(o.pos.lat()));
    key = hash_combine(key, std::bit_cast<std::uint64_t>(o.pos.lon()));
    return unit_from_key(key) < r.f;
}

std::vector<PairedObservation> apply_strategy(std::span<const PairedObservation> obs,
                                              const SamplingStrategy& strategy,
                                              Timestamp dataset_start) {
    validate(strategy);
    std::vector<PairedObservation> out;
    if (const auto* p = std::get_if<InitialPeriod>(&strategy)) {
        const std::int64_t cutoff = dataset_start.ms() + p->days * kDayMs;
        for (const auto& o : obs)
            if (o.ts.ms() < cutoff) out.push_back(o);
    } else if (const auto* r = std::get_if<RandomFraction>(&strategy)) {
        for (const auto& o : obs)
            if (keep_event(o, *r)) out.push_back(o);
    } else {
        throw ContractError("top routers selects routers, not training pairs");
    }
    return out;
}

// Base database with some records replaced or removed.
class OverlayLookup : public PositionLookup {
public:
    explicit OverlayLookup(const ApDatabase& base) : base_(&base) {}
    void replace(BssidId b, std::optional<ApRecord> rec) { overrides_[b] = std::move(rec); }

    std::optional<GeoPoint> position_at(BssidId b, Timestamp t) const override {
        const auto it = overrides_.find(b);
        if (it == overrides_.end()) return base_->position_at(b, t);
        return it->second ? it->second->position_at(t) : std::nullopt;
    }

private:
    const ApDatabase* base_;
    std::unordered_map<BssidId, std::optional<ApRecord>> overrides_;
};

// Base database restricted to an allowed set of BSSIDs.
class FilteredLookup : public PositionLookup {
public:
    FilteredLookup(const ApDatabase& base, std::unordered_set<BssidId> allowed)
        : base_(&base), allowed_(std::move(allowed)) {}

    std::optional<GeoPoint> position_at(BssidId b, Timestamp t) const override {
        if (!allowed_.contains(b)) return std::nullopt;
        return base_->position_at(b, t);
    }

private:
    const ApDatabase* base_;
    std::unordered_set<BssidId> allowed_;
};

template <typename F>
void for_each_index(std::size_t n, Exec exec, F&& f) {
    const auto sn = static_cast<std::int64_t>(n);
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < sn; ++i) f(static_cast<std::size_t>(i));
    } else {
        for (std::int64_t i = 0; i < sn; ++i) f(static_cast<std::size_t>(i));
    }
}

bool by_bssid(const PairedObservation& a, const PairedObservation& b) { return a.bssid < b.bssid; }

}  // namespace

std::vector<PairedObservation> select_training_pairs(std::span<const PairedObservation> obs,
                                                     const SamplingStrategy& strategy,
                                                     const std::optional<UserId>& viewer,
                                                     Scenario scenario, Timestamp dataset_start) {
    if (scenario != Scenario::global && !viewer)
        throw ContractError(std::string(scenario_name(scenario)) + " scenario needs a viewer");
    auto kept = apply_strategy(obs, strategy, dataset_start);
    if (scenario == Scenario::global) return kept;
    const bool own = scenario == Scenario::personal;
    std::erase_if(kept, [&](const PairedObservation& o) { return (o.user == *viewer) != own; });
    return kept;
}

std::vector<BssidId> greedy_top_routers(std::span<const WifiScan> scans, std::size_t k,
                                        std::int64_t bin_ms) {
    if (k < 1) throw ContractError("k must be >= 1");
    if (bin_ms <= 0) throw ContractError("bin_ms must be positive");

    std::map<std::pair<UserId, std::int64_t>, std::uint32_t> bin_id;
    std::unordered_map<BssidId, std::vector<std::uint32_t>> sets;
    for (const auto& scan : scans) {
        const auto [it, fresh] = bin_id.emplace(
            std::make_pair(scan.user, floor_div(scan.ts.ms(), bin_ms)),
            static_cast<std::uint32_t>(bin_id.size()));
        (void)fresh;
        for (const auto& s : scan.sightings) sets[s.bssid].push_back(it->second);
    }
    for (auto& [b, v] : sets) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    // Lazy greedy: stale gains are upper bounds because coverage gains only
    // shrink as routers are chosen.
    using Entry = std::pair<std::size_t, BssidId>;
    const auto worse = [](const Entry& a, const Entry& b) {
        return a.first != b.first ? a.first < b.first : a.second > b.second;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
    for (const auto& [b, v] : sets) heap.emplace(v.size(), b);

    std::vector<bool> covered(bin_id.size(), false);
    std::vector<BssidId> chosen;
    while (chosen.size() < k && !heap.empty()) {
        const BssidId b = heap.top().second;
        heap.pop();
        std::size_t gain = 0;
        for (auto id : sets[b]) gain += covered[id] ? 0 : 1;
        const Entry fresh{gain, b};
        if (heap.empty() || !worse(fresh, heap.top())) {
            chosen.push_back(b);
            for (auto id : sets[b]) covered[id] = true;
        } else {
            heap.push(fresh);
        }
    }
    return chosen;
}

std::size_t covered_user_bins(std::span<const WifiScan> scans, std::span<const BssidId> routers,
                              std::int64_t bin_ms) {
    const std::unordered_set<BssidId> wanted(routers.begin(), routers.end());
    std::set<std::pair<UserId, std::int64_t>> hit;
    for (const auto& scan : scans)
        for (const auto& s : scan.sightings)
            if (wanted.contains(s.bssid)) {
                hit.emplace(scan.user, floor_div(scan.ts.ms(), bin_ms));
                break;
            }
    return hit.size();
}

Histogram coverage_histogram(std::span<const UserDayCoverage> rows, std::int64_t day) {
    Histogram h{};
    for (const auto& r : rows) {
        if (r.day != day || r.with_data == 0) continue;
        // Integer arithmetic keeps fractions like 0.3 out of the wrong bin.
        const std::size_t bin = std::min<std::size_t>(h.size() - 1, r.covered * 10 / r.with_data);
        ++h[bin];
    }
    return h;
}

std::optional<double> ExperimentResult::mean_coverage() const {
    if (series.per_user_day.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& [key, f] : series.per_user_day) sum += f;
    return sum / static_cast<double>(series.per_user_day.size());
}

std::optional<Histogram> ExperimentResult::histogram_at(std::int64_t day) const {
    const auto it = histograms.find(day);
    if (it == histograms.end()) return std::nullopt;
    return it->second;
}

ExperimentContext::ExperimentContext(const TraceSet& traces, const LocatorConfig& locator,
                                     const PairingConfig& pairing, Exec exec)
    : traces_(&traces), locator_(locator), exec_(exec) {
    locator_.validate();
    obs_ = pair_observations(traces, pairing, exec);
    full_db_ = build_database(obs_, locator_, exec, "all observations");
    start_ = traces.earliest().value_or(Timestamp(0));
    users_ = traces.users();

    std::set<std::tuple<UserId, Timestamp, GeoPoint>> events;
    for (const auto& o : obs_) events.emplace(o.user, o.ts, o.pos);
    paired_events_ = events.size();

    Timestamp last = start_;
    for (const auto& f : traces.fixes()) last = std::max(last, f.ts);
    for (const auto& s : traces.scans()) last = std::max(last, s.ts);
    span_days_ = users_.empty() ? 0 : day_index(last, start_) + 1;
}

double ExperimentContext::fraction_for_daily_rate(double per_user_per_day) const {
    if (paired_events_ == 0) return 0.0;
    const double want =
        per_user_per_day * static_cast<double>(users_.size()) * static_cast<double>(span_days_);
    return std::clamp(want / static_cast<double>(paired_events_), 0.0, 1.0);
}

std::vector<BssidId> ExperimentContext::top_routers(const UserId& user, std::size_t k,
                                                    std::int64_t bin_ms) const {
    return greedy_top_routers(traces_->scans_of(user), k, bin_ms);
}

namespace {

ExperimentResult finish(const SamplingStrategy& strategy, Scenario scenario,
                        std::vector<std::vector<UserDayCoverage>>& per_viewer,
                        const ExperimentOptions& opts) {
    ExperimentResult r;
    r.strategy = strategy;
    r.scenario = scenario;
    for (auto& v : per_viewer) r.rows.insert(r.rows.end(), v.begin(), v.end());
    r.series = CoverageSeries::from(r.rows);
    for (std::int64_t d : opts.histogram_days) r.histograms[d] = coverage_histogram(r.rows, d);
    return r;
}

}  // namespace

std::array<ExperimentResult, 3> run_all_scenarios(const ExperimentContext& ctx,
                                                  const SamplingStrategy& strategy,
                                                  const ExperimentOptions& opts) {
    validate(strategy);
    const auto users = ctx.users();
    const auto& traces = ctx.traces();
    // [scenario][viewer]
    std::array<std::vector<std::vector<UserDayCoverage>>, 3> rows;
    for (auto& r : rows) r.resize(users.size());
    const auto record = [&](std::size_t v, const PositionLookup& global,
                            const PositionLookup& personal, const PositionLookup& others) {
        const auto scans = traces.scans_of(users[v]);
        const auto start = ctx.dataset_start();
        rows[0][v] = user_coverage(scans, global, start, opts.bin_ms);
        rows[1][v] = user_coverage(scans, personal, start, opts.bin_ms);
        rows[2][v] = user_coverage(scans, others, start, opts.bin_ms);
    };

    if (const auto* top = std::get_if<TopRouters>(&strategy)) {
        std::vector<std::vector<BssidId>> lists(users.size());
        for_each_index(users.size(), ctx.exec(), [&](std::size_t v) {
            lists[v] = ctx.top_routers(users[v], top->k, opts.bin_ms);
        });
        std::unordered_map<BssidId, std::size_t> owners;
        for (const auto& l : lists)
            for (BssidId b : l) ++owners[b];
        std::unordered_set<BssidId> all;
        for (const auto& [b, n] : owners) all.insert(b);
        const FilteredLookup global(ctx.full_database(), all);

        for_each_index(users.size(), ctx.exec(), [&](std::size_t v) {
            const std::unordered_set<BssidId> own(lists[v].begin(), lists[v].end());
            std::unordered_set<BssidId> others;
            for (const auto& [b, n] : owners)
                if (n > (own.contains(b) ? 1u : 0u)) others.insert(b);
            record(v, global, FilteredLookup(ctx.full_database(), own),
                   FilteredLookup(ctx.full_database(), std::move(others)));
        });
    } else {
        const auto train = apply_strategy(ctx.observations(), strategy, ctx.dataset_start());
        const ApDatabase pooled =
            build_database(train, ctx.locator(), ctx.exec(), "pooled training pairs");
        for_each_index(users.size(), ctx.exec(), [&](std::size_t v) {
            std::vector<PairedObservation> own;
            for (const auto& o : train)
                if (o.user == users[v]) own.push_back(o);
            const ApDatabase personal = build_database(own, ctx.locator(), Exec::serial, "personal");

            OverlayLookup others(pooled);
            std::vector<PairedObservation> rest;
            for (const auto& rec : personal.records()) {
                const auto [lo, hi] = std::equal_range(train.begin(), train.end(),
                                                       PairedObservation{rec.bssid, {}, {}, {}},
                                                       by_bssid);
                rest.clear();
                for (auto it = lo; it != hi; ++it)
                    if (it->user != users[v]) rest.push_back(*it);
                if (rest.empty())
                    others.replace(rec.bssid, std::nullopt);
                else
                    others.replace(rec.bssid, classify_ap(rec.bssid, rest, ctx.locator()));
            }
            const UnionLookup global({&pooled, &personal, &others});
            record(v, global, personal, others);
        });
    }

    return {finish(strategy, Scenario::global, rows[0], opts),
            finish(strategy, Scenario::personal, rows[1], opts),
            finish(strategy, Scenario::global_excluding_self, rows[2], opts)};
}

ExperimentResult run_experiment(const ExperimentContext& ctx, const SamplingStrategy& strategy,
                                Scenario scenario, const ExperimentOptions& opts) {
    auto all = run_all_scenarios(ctx, strategy, opts);
    for (auto& r : all)
        if (r.scenario == scenario) return std::move(r);
    throw ContractError("unknown scenario");
}

std::vector<ExperimentResult> run_grid(const ExperimentContext& ctx,
                                       std::span<const SamplingStrategy> strategies,
                                       const ExperimentOptions& opts) {
    std::vector<ExperimentResult> out;
    for (const auto& s : strategies) {
        auto three = run_all_scenarios(ctx, s, opts);
        for (auto& r : three) out.push_back(std::move(r));
    }
    return out;
}

std::optional<DeclineStats> stability_decline(const ExperimentResult& result,
                                              const DeclineOptions& opts) {
    const auto& means = result.series.daily_mean;
    if (means.empty() || means.rbegin()->first < opts.late_day) return std::nullopt;
    const auto window_mean = [&](std::int64_t day) -> std::optional<double> {
        double sum = 0.0;
        std::size_t n = 0;
        for (auto it = means.lower_bound(day - opts.smoothing_half_width);
             it != means.end() && it->first <= day + opts.smoothing_half_width; ++it) {
            sum += it->second;
            ++n;
        }
        if (n == 0) return std::nullopt;
        return sum / static_cast<double>(n);
    };
    const auto early = window_mean(opts.early_day);
    const auto late = window_mean(opts.late_day);
    if (!early || !late) return std::nullopt;
    DeclineStats s;
    s.early_mean = *early;
    s.late_mean = *late;
    s.decline = *early - *late;
    if (means.contains(opts.histogram_day))
        s.terminal_histogram = coverage_histogram(result.rows, opts.histogram_day);
    return s;
}

}  // namespace wifitrack
