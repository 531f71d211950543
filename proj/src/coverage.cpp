#include "wifitrack/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "wifitrack/csv.hpp"

namespace wifitrack {

std::optional<double> time_coverage(std::size_t with_data, std::size_t covered) {
    if (covered > with_data) throw ContractError("more covered bins than bins with data");
    if (with_data == 0) return std::nullopt;
    return static_cast<double>(covered) / static_cast<double>(with_data);
}

std::int64_t day_index(Timestamp t, Timestamp dataset_start) {
    return floor_div(t.ms(), kDayMs) - floor_div(dataset_start.ms(), kDayMs);
}

namespace {

// Accumulates bins in ascending order into per-day rows.
class DayAccumulator {
public:
    DayAccumulator(UserId user, Timestamp start, std::int64_t bin_ms)
        : user_(std::move(user)), start_(start), bin_ms_(bin_ms) {}

    void add(std::int64_t bin, bool covered) {
        const std::int64_t day = day_index(Timestamp(bin * bin_ms_), start_);
        if (rows_.empty() || rows_.back().day != day) rows_.push_back({user_, day, 0, 0});
        ++rows_.back().with_data;
        if (covered) ++rows_.back().covered;
    }
    std::vector<UserDayCoverage> take() { return std::move(rows_); }

private:
    UserId user_;
    Timestamp start_;
    std::int64_t bin_ms_;
    std::vector<UserDayCoverage> rows_;
};

}  // namespace

std::vector<UserDayCoverage> coverage_from_timeline(const BinnedTimeline& tl,
                                                    Timestamp dataset_start) {
    DayAccumulator acc(tl.user, dataset_start, tl.bin_ms);
    for (const auto& [bin, est] : tl.bins) acc.add(bin, est.has_value());
    return acc.take();
}

std::vector<UserDayCoverage> user_coverage(std::span<const WifiScan> scans,
                                           const PositionLookup& db, Timestamp dataset_start,
                                           std::int64_t bin_ms) {
    if (bin_ms <= 0) throw ContractError("bin_ms must be positive");
    if (scans.empty()) return {};
    DayAccumulator acc(scans.front().user, dataset_start, bin_ms);
    std::size_t i = 0;
    while (i < scans.size()) {
        const std::int64_t bin = floor_div(scans[i].ts.ms(), bin_ms);
        bool covered = false;
        for (; i < scans.size() && floor_div(scans[i].ts.ms(), bin_ms) == bin; ++i) {
            if (i && scans[i].ts < scans[i - 1].ts) throw ContractError("scans must be sorted");
            if (covered) continue;
            for (const auto& s : scans[i].sightings)
                if (db.position_at(s.bssid, scans[i].ts)) {
                    covered = true;
                    break;
                }
        }
        acc.add(bin, covered);
    }
    return acc.take();
}

CoverageSeries CoverageSeries::from(std::span<const UserDayCoverage> rows) {
    CoverageSeries s;
    for (const auto& r : rows) {
        if (r.with_data == 0) continue;
        if (!s.per_user_day.emplace(std::make_pair(r.user, r.day), r.fraction()).second)
            throw ContractError("duplicate user-day in coverage rows");
    }
    std::map<std::int64_t, double> sums;
    for (const auto& [key, f] : s.per_user_day) {
        sums[key.second] += f;
        ++s.daily_users[key.second];
    }
    for (const auto& [day, sum] : sums)
        s.daily_mean[day] = sum / static_cast<double>(s.daily_users[day]);
    return s;
}

std::optional<double> daily_population_mean(const CoverageSeries& s, std::int64_t day) {
    const auto it = s.daily_mean.find(day);
    if (it == s.daily_mean.end()) return std::nullopt;
    return it->second;
}

std::optional<double> entropy_bits(const EntropyInput& in) {
    if (in.labels.empty()) return std::nullopt;
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& l : in.labels) ++counts[l];
    std::vector<std::size_t> c;
    c.reserve(counts.size());
    for (const auto& kv : counts) c.push_back(kv.second);
    std::sort(c.begin(), c.end());  // fixed summation order
    // H = log2 N - (1/N) sum c log2 c; exact for uniform counts.
    const double n = static_cast<double>(in.labels.size());
    double acc = 0.0;
    for (std::size_t k : c)
        if (k > 1) acc += static_cast<double>(k) * std::log2(static_cast<double>(k));
    return std::max(0.0, std::log2(n) - acc / n);
}

EntropyInput entropy_labels(const BinnedTimeline& tl, const ApDatabase& db) {
    EntropyInput in;
    for (const auto& [bin, est] : tl.bins) {
        if (!est) continue;
        const BssidId b = est->support.front();
        std::string label = b.str();
        if (const auto* rec = db.find(b))
            if (const auto* r = std::get_if<RelocatedAp>(&rec->cls))
                for (std::size_t k = 0; k < r->segments.size(); ++k)
                    if (r->segments[k].interval.contains(est->ts)) {
                        label += "#" + std::to_string(k);
                        break;
                    }
        in.labels.push_back(std::move(label));
    }
    return in;
}

void write_user_coverage_csv(std::span<const UserDayCoverage> rows,
                             const std::filesystem::path& path) {
    CsvWriter w(path, {"user", "day_index", "with_data", "covered", "coverage"});
    for (const auto& r : rows)
        w.row({r.user.str(), std::to_string(r.day), std::to_string(r.with_data),
               std::to_string(r.covered), format_double(r.fraction())});
    w.close();
}

}  // namespace wifitrack
