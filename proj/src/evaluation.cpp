#include "wifitrack/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "wifitrack/csv.hpp"

namespace wifitrack {

std::optional<double> percentile(std::vector<double> values, double p) {
    if (values.empty()) return std::nullopt;
    if (!(p > 0.0 && p <= 1.0)) throw ContractError("percentile must be in (0, 1]");
    std::sort(values.begin(), values.end());
    const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(values.size())));
    return values[std::max<std::size_t>(rank, 1) - 1];
}

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::optional<double> ApEvaluation::static_located_fraction() const {
    return ratio(static_located, static_eligible);
}
std::optional<double> ApEvaluation::static_mobile_rate() const {
    return ratio(static_as_mobile, static_classified);
}
std::optional<double> ApEvaluation::mobile_recall() const {
    return ratio(mobile_as_mobile, mobile_classified);
}

ApEvaluation evaluate_database(const ApDatabase& db, std::span<const TruthApRow> truth,
                               std::size_t min_sightings, double max_error_m) {
    ApEvaluation ev;
    for (const auto& t : truth) {
        const ApRecord* rec = db.find(t.bssid);
        const std::string predicted = rec ? class_name(rec->cls) : "absent";
        ++ev.confusion[t.cls][predicted];
        const bool classified = rec && !std::holds_alternative<InsufficientAp>(rec->cls);
        if (t.cls == "static") {
            if (classified) ++ev.static_classified;
            if (rec && std::holds_alternative<MobileAp>(rec->cls)) ++ev.static_as_mobile;
            if (!rec || rec->n_sightings < min_sightings) continue;
            ++ev.static_eligible;
            if (const auto* s = std::get_if<StaticAp>(&rec->cls); s && t.pos) {
                const double err = haversine_m(s->pos, *t.pos);
                ev.static_errors_m.push_back(err);
                if (err <= max_error_m) ++ev.static_located;
            }
        } else if (t.cls == "mobile" && classified) {
            ++ev.mobile_classified;
            if (std::holds_alternative<MobileAp>(rec->cls)) ++ev.mobile_as_mobile;
        }
    }
    return ev;
}

std::vector<TimelineRow> timeline_rows(std::span<const BinnedTimeline> timelines) {
    std::vector<TimelineRow> rows;
    for (const auto& tl : timelines)
        for (const auto& [bin, est] : tl.bins) {
            TimelineRow r{tl.user, bin, bin * tl.bin_ms, std::nullopt, 0};
            if (est) {
                r.pos = est->pos;
                r.support_count = est->support.size();
            }
            rows.push_back(std::move(r));
        }
    return rows;
}

std::vector<TimelineRow> read_timeline_csv(const std::filesystem::path& path) {
    const auto t = CsvTable::read(path);
    const auto cu = t.column("user"), cb = t.column("bin_index"), cs = t.column("bin_start_ms"),
               clat = t.column("lat"), clon = t.column("lon"), cn = t.column("support_count");
    std::vector<TimelineRow> rows;
    rows.reserve(t.rows().size());
    for (const auto& r : t.rows()) {
        TimelineRow row{UserId(r[cu]), parse_int(r[cb]), parse_int(r[cs]), std::nullopt,
                        static_cast<std::size_t>(parse_int(r[cn]))};
        if (!r[clat].empty()) row.pos = GeoPoint(parse_double(r[clat]), parse_double(r[clon]));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::optional<double> BinEvaluation::fraction_within(double meters) const {
    if (errors_m.empty()) return std::nullopt;
    const auto n = std::count_if(errors_m.begin(), errors_m.end(),
                                 [&](double e) { return e <= meters; });
    return static_cast<double>(n) / static_cast<double>(errors_m.size());
}

BinEvaluation evaluate_bins(std::span<const TimelineRow> rows, const TruthTracks& truth) {
    BinEvaluation ev;
    for (const auto& r : rows) {
        ++ev.bins_with_data;
        if (!r.pos) continue;
        ++ev.bins_estimated;
        const auto it = truth.find(r.user);
        if (it == truth.end()) {
            ++ev.bins_without_truth;
            continue;
        }
        const auto& track = it->second;
        const auto s = std::lower_bound(
            track.begin(), track.end(), r.bin_start_ms,
            [](const std::pair<std::int64_t, GeoPoint>& e, std::int64_t v) { return e.first < v; });
        if (s == track.end()) {
            ++ev.bins_without_truth;
            continue;
        }
        ev.errors_m.push_back(haversine_m(*r.pos, s->second));
    }
    // Sorting makes the error list independent of row order.
    std::sort(ev.errors_m.begin(), ev.errors_m.end());
    return ev;
}

}  // namespace wifitrack
