#include "wifitrack/trace_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "wifitrack/csv.hpp"

namespace wifitrack {

namespace {

using nlohmann::json;

json parse_object(std::string_view line) {
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw ParseError("invalid JSON");
    if (!j.is_object()) throw ParseError("line is not a JSON object");
    return j;
}

const json& require(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
    return *it;
}

UserId read_user(const json& j) {
    const auto& u = require(j, "user");
    if (!u.is_string()) throw ParseError("'user' must be a string");
    const auto& s = u.get_ref<const std::string&>();
    if (s.empty()) throw ParseError("'user' is empty");
    return UserId(s);
}

Timestamp read_ts(const json& j) {
    const auto& t = require(j, "ts_ms");
    if (!t.is_number_integer()) throw ParseError("'ts_ms' must be an integer");
    if (t.is_number_unsigned()) {
        const auto v = t.get<std::uint64_t>();
        if (v > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
            throw ParseError("'ts_ms' out of range");
        return Timestamp(static_cast<std::int64_t>(v));
    }
    const auto v = t.get<std::int64_t>();
    if (v < 0) throw ParseError("'ts_ms' is negative");
    return Timestamp(v);
}

double read_number(const json& j, const char* key) {
    const auto& v = require(j, key);
    if (!v.is_number()) throw ParseError(std::string("'") + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ParseError(std::string("'") + key + "' is not finite");
    return d;
}

std::string quote(const std::string& s) { return json(s).dump(); }

}  // namespace

GpsFix parse_gps_line(std::string_view line) {
    const json j = parse_object(line);
    GpsFix fix;
    fix.user = read_user(j);
    fix.ts = read_ts(j);
    const double lat = read_number(j, "lat");
    const double lon = read_number(j, "lon");
    try {
        fix.pos = GeoPoint(lat, lon);
    } catch (const ContractError& e) {
        throw ParseError(e.what());
    }
    if (j.contains("acc_m")) {
        const double acc = read_number(j, "acc_m");
        if (acc < 0.0) throw ParseError("'acc_m' is negative");
        fix.accuracy_m = acc;
    }
    return fix;
}

WifiScan parse_wifi_line(std::string_view line) {
    const json j = parse_object(line);
    WifiScan scan;
    scan.user = read_user(j);
    scan.ts = read_ts(j);
    const auto& aps = require(j, "aps");
    if (!aps.is_array()) throw ParseError("'aps' must be an array");
    scan.sightings.reserve(aps.size());
    for (const auto& ap : aps) {
        if (!ap.is_object()) throw ParseError("'aps' entries must be objects");
        const auto& b = require(ap, "bssid");
        if (!b.is_string()) throw ParseError("'bssid' must be a string");
        ApSighting s;
        s.bssid = normalize_bssid(b.get_ref<const std::string&>());
        if (const auto it = ap.find("ssid"); it != ap.end()) {
            if (!it->is_string()) throw ParseError("'ssid' must be a string");
            s.ssid = Ssid(it->get_ref<const std::string&>());
        }
        if (const auto it = ap.find("rssi"); it != ap.end()) {
            if (!it->is_number_integer()) throw ParseError("'rssi' must be an integer");
            const auto v = it->get<std::int64_t>();
            if (v < -120 || v > 0) throw ParseError("'rssi' outside [-120, 0]");
            s.rssi_dbm = static_cast<std::int16_t>(v);
        }
        scan.sightings.push_back(s);
    }
    merge_duplicate_sightings(scan.sightings);
    return scan;
}

std::string format_gps_line(const GpsFix& fix) {
    std::string out = "{\"user\":" + quote(fix.user.str());
    out += ",\"ts_ms\":" + std::to_string(fix.ts.ms());
    out += ",\"lat\":" + format_double(fix.pos.lat());
    out += ",\"lon\":" + format_double(fix.pos.lon());
    if (fix.accuracy_m) out += ",\"acc_m\":" + format_double(*fix.accuracy_m);
    out += '}';
    return out;
}

std::string format_wifi_line(const WifiScan& scan) {
    std::string out = "{\"user\":" + quote(scan.user.str());
    out += ",\"ts_ms\":" + std::to_string(scan.ts.ms());
    out += ",\"aps\":[";
    for (std::size_t i = 0; i < scan.sightings.size(); ++i) {
        const auto& s = scan.sightings[i];
        if (i) out += ',';
        out += "{\"bssid\":\"" + s.bssid.str() + '"';
        if (!s.ssid.is_null()) out += ",\"ssid\":" + quote(s.ssid.str());
        if (s.rssi_dbm) out += ",\"rssi\":" + std::to_string(*s.rssi_dbm);
        out += '}';
    }
    out += "]}";
    return out;
}

namespace {

template <class Record, class Parse>
std::vector<Record> read_jsonl(const std::filesystem::path& path, FileReport& report,
                               Parse parse) {
    auto in = open_input(path);
    std::vector<Record> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            records.push_back(parse(line));
        } catch (const std::exception& e) {
            ++report.malformed;
            if (report.samples.size() < 5)
                report.samples.push_back(path.filename().string() + ":" +
                                         std::to_string(line_no) + ": " + e.what());
        }
    }
    if (in.bad()) throw IoError("error reading " + path.string());
    report.records = records.size();
    const std::size_t total = report.records + report.malformed;
    if (report.malformed > 1 &&
        static_cast<double>(report.malformed) > kMaxMalformedFraction * static_cast<double>(total)) {
        std::string msg = path.string() + ": " + std::to_string(report.malformed) + " of " +
                          std::to_string(total) + " lines malformed";
        if (!report.samples.empty()) msg += " (first: " + report.samples.front() + ")";
        throw ParseError(msg);
    }
    return records;
}

}  // namespace

IngestResult ingest_traces(const std::filesystem::path& gps_path,
                           const std::filesystem::path& wifi_path) {
    IngestReport report;
    auto fixes = read_jsonl<GpsFix>(gps_path, report.gps, parse_gps_line);
    auto scans = read_jsonl<WifiScan>(wifi_path, report.wifi, parse_wifi_line);
    return {TraceSet(std::move(fixes), std::move(scans)), std::move(report)};
}

void write_traces(const TraceSet& traces, const std::filesystem::path& gps_path,
                  const std::filesystem::path& wifi_path) {
    {
        auto out = open_output(gps_path);
        for (const auto& f : traces.fixes()) out << format_gps_line(f) << '\n';
        if (!out) throw IoError("failed writing " + gps_path.string());
    }
    {
        auto out = open_output(wifi_path);
        for (const auto& s : traces.scans()) out << format_wifi_line(s) << '\n';
        if (!out) throw IoError("failed writing " + wifi_path.string());
    }
}

}  // namespace wifitrack
