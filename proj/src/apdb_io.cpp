#include "wifitrack/apdb_io.hpp"

#include <json.hpp>

#include "wifitrack/csv.hpp"

namespace wifitrack {

namespace {

std::string segments_json(const RelocatedAp& r) {
    // Built by hand so the doubles keep their shortest round-trip form.
    std::string out = "[";
    for (std::size_t i = 0; i < r.segments.size(); ++i) {
        const auto& s = r.segments[i];
        if (i) out += ',';
        out += "{\"lat\":" + format_double(s.pos.lat()) + ",\"lon\":" + format_double(s.pos.lon()) +
               ",\"start_ms\":" + std::to_string(s.interval.start.ms()) +
               ",\"end_ms\":" + std::to_string(s.interval.end.ms()) + "}";
    }
    return out + "]";
}

RelocatedAp parse_segments(const std::string& text) {
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_array()) throw ParseError("bad segments_json: " + text);
    RelocatedAp r;
    for (const auto& s : j) {
        if (!s.is_object() || !s.contains("lat") || !s.contains("lon") ||
            !s.contains("start_ms") || !s.contains("end_ms"))
            throw ParseError("bad segment in segments_json: " + text);
        r.segments.push_back({GeoPoint(s["lat"].get<double>(), s["lon"].get<double>()),
                              TimeInterval(Timestamp(s["start_ms"].get<std::int64_t>()),
                                           Timestamp(s["end_ms"].get<std::int64_t>()))});
    }
    if (r.segments.size() < 2) throw ParseError("relocated record needs two segments");
    return r;
}

}  // namespace

void write_apdb_csv(const ApDatabase& db, const std::filesystem::path& path) {
    CsvWriter w(path, {"bssid", "class", "lat", "lon", "n_sightings", "segments_json",
                       "contributors_count"});
    for (const auto& rec : db.records()) {
        std::string lat, lon, segs;
        if (const auto* s = std::get_if<StaticAp>(&rec.cls)) {
            lat = format_double(s->pos.lat());
            lon = format_double(s->pos.lon());
        } else if (const auto* r = std::get_if<RelocatedAp>(&rec.cls)) {
            segs = segments_json(*r);
        }
        w.row({rec.bssid.str(), class_name(rec.cls), lat, lon, std::to_string(rec.n_sightings),
               segs, std::to_string(rec.contributor_count)});
    }
    w.close();
}

ApDatabase read_apdb_csv(const std::filesystem::path& path) {
    const auto table = CsvTable::read(path);
    const std::size_t c_bssid = table.column("bssid"), c_class = table.column("class"),
                      c_lat = table.column("lat"), c_lon = table.column("lon"),
                      c_n = table.column("n_sightings"), c_seg = table.column("segments_json"),
                      c_contrib = table.column("contributors_count");
    std::vector<ApRecord> records;
    records.reserve(table.rows().size());
    for (const auto& row : table.rows()) {
        ApRecord rec;
        rec.bssid = normalize_bssid(row[c_bssid]);
        rec.n_sightings = static_cast<std::size_t>(parse_int(row[c_n]));
        rec.contributor_count = static_cast<std::size_t>(parse_int(row[c_contrib]));
        const std::string& cls = row[c_class];
        if (cls == "static") {
            rec.cls = StaticAp{GeoPoint(parse_double(row[c_lat]), parse_double(row[c_lon])),
                               rec.n_sightings};
        } else if (cls == "relocated") {
            rec.cls = parse_segments(row[c_seg]);
        } else if (cls == "mobile") {
            rec.cls = MobileAp{};
        } else if (cls == "insufficient") {
            rec.cls = InsufficientAp{};
        } else {
            throw ParseError("unknown AP class '" + cls + "' in " + path.string());
        }
        records.push_back(std::move(rec));
    }
    return ApDatabase(std::move(records), path.string());
}

}  // namespace wifitrack
