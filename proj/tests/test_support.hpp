#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "wifitrack/geo.hpp"
#include "wifitrack/trace_model.hpp"

namespace testing_support {

using namespace wifitrack;

inline constexpr std::int64_t kT0 = 1'349'049'600'000;  // a midnight UTC

inline const GeoPoint kOrigin{55.6761, 12.5683};

/// Point displaced east / north of `from`, in meters.
inline GeoPoint offset(const GeoPoint& from, double east_m, double north_m) {
    return LocalFrame(from).to_geo({east_m, north_m});
}

inline GpsFix fix(const char* user, std::int64_t ts, const GeoPoint& pos) {
    return {UserId(user), Timestamp(ts), pos, std::nullopt};
}

inline WifiScan scan(const char* user, std::int64_t ts, std::initializer_list<std::uint64_t> bssids) {
    WifiScan s{UserId(user), Timestamp(ts), {}};
    for (auto b : bssids) s.sightings.push_back({BssidId(b), Ssid(), std::nullopt});
    return s;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("wifitrack_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace testing_support
