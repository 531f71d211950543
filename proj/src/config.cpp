#include "wifitrack/config.hpp"

#include <charconv>
#include <functional>
#include <sstream>

#include "wifitrack/csv.hpp"

namespace wifitrack {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T number(const std::string& v) {
    T out{};
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ParseError("not a number: '" + v + "'");
    return out;
}

using Setter = std::function<void(const ConfigTargets&, const std::string&)>;

template <typename S, typename T>
std::pair<std::string, Setter> field(const char* name, S* ConfigTargets::*target, T S::*member) {
    return {name, [target, member, name](const ConfigTargets& t, const std::string& v) {
                S* s = t.*target;
                if (!s) throw ParseError(std::string("key '") + name + "' does not apply here");
                if constexpr (std::is_same_v<T, std::optional<double>>)
                    s->*member = number<double>(v);
                else if constexpr (std::is_same_v<T, std::optional<int>>)
                    s->*member = number<int>(v);
                else
                    s->*member = number<T>(v);
            }};
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> m;
        const auto P = &ConfigTargets::pairing;
        const auto L = &ConfigTargets::locator;
        const auto W = &ConfigTargets::world;
        m.insert(field("window_ms", P, &PairingConfig::window_ms));
        m.insert(field("max_accuracy_m", P, &PairingConfig::max_accuracy_m));
        m.insert(field("eps_m", L, &LocatorConfig::eps_m));
        m.insert(field("min_sightings", L, &LocatorConfig::min_sightings));
        m.insert(field("min_cluster_pts", L, &LocatorConfig::min_cluster_pts));
        m.insert(field("clustered_fraction_min", L, &LocatorConfig::clustered_fraction_min));
        m.insert(field("earth_radius_m", L, &LocatorConfig::earth_radius_m));
        m.insert(field("seed", W, &WorldSpec::seed));
        m.insert(field("n_users", W, &WorldSpec::n_users));
        m.insert(field("n_days", W, &WorldSpec::n_days));
        m.insert(field("city_km_x", W, &WorldSpec::city_km_x));
        m.insert(field("city_km_y", W, &WorldSpec::city_km_y));
        m.insert(field("density_cells", W, &WorldSpec::density_cells));
        m.insert(field("n_buildings", W, &WorldSpec::n_buildings));
        m.insert(field("n_static_aps", W, &WorldSpec::n_static_aps));
        m.insert(field("ap_count_sigma", W, &WorldSpec::ap_count_sigma));
        m.insert(field("visibility_radius_m", W, &WorldSpec::visibility_radius_m));
        m.insert(field("wifi_scan_period_s", W, &WorldSpec::wifi_scan_period_s));
        m.insert(field("gps_period_s", W, &WorldSpec::gps_period_s));
        m.insert(field("gps_noise_m", W, &WorldSpec::gps_noise_m));
        m.insert(field("mobile_ap_fraction", W, &WorldSpec::mobile_ap_fraction));
        m.insert(field("routine_change_day", W, &WorldSpec::routine_change_day));
        m.insert(field("colocated_fraction", W, &WorldSpec::colocated_fraction));
        m.insert(field("n_relocated_aps", W, &WorldSpec::n_relocated_aps));
        m.insert(field("center_lat", W, &WorldSpec::center_lat));
        m.insert(field("center_lon", W, &WorldSpec::center_lon));
        m.insert(field("origin_ms", W, &WorldSpec::origin_ms));
        m.emplace("density_weights", [](const ConfigTargets& t, const std::string& v) {
            if (!t.world) throw ParseError("key 'density_weights' does not apply here");
            std::vector<double> w;
            std::stringstream ss(v);
            std::string item;
            while (std::getline(ss, item, ',')) w.push_back(number<double>(std::string(trim(item))));
            t.world->density_weights = std::move(w);
        });
        return m;
    }();
    return table;
}

}  // namespace

ConfigFile ConfigFile::parse(std::string_view text, std::string source) {
    ConfigFile cfg;
    cfg.source = std::move(source);
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(cfg.source + ":" + std::to_string(line_no) + ": expected key=value");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty())
            throw ParseError(cfg.source + ":" + std::to_string(line_no) + ": empty key");
        if (!cfg.entries.emplace(key, Entry{value, line_no}).second)
            throw ParseError(cfg.source + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

void apply_config(const ConfigFile& cfg, const ConfigTargets& targets) {
    const auto& table = setters();
    for (const auto& [key, entry] : cfg.entries) {
        const std::string where = cfg.source + ":" + std::to_string(entry.line) + ": ";
        const auto it = table.find(key);
        if (it == table.end()) throw ParseError(where + "unknown key '" + key + "'");
        try {
            it->second(targets, entry.value);
        } catch (const ParseError& e) {
            throw ParseError(where + key + ": " + e.what());
        }
    }
}

std::vector<std::string> known_config_keys() {
    std::vector<std::string> keys;
    for (const auto& [k, s] : setters()) keys.push_back(k);
    return keys;
}

}  // namespace wifitrack
