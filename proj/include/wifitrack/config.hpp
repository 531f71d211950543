#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wifitrack/ap_locator.hpp"
#include "wifitrack/pairing.hpp"
#include "wifitrack/synthgen.hpp"

namespace wifitrack {

/// Flat key=value settings, one per line; '#' starts a comment.
struct ConfigFile {
    struct Entry {
        std::string value;
        int line = 0;
    };
    std::map<std::string, Entry> entries;
    std::string source;

    static ConfigFile parse(std::string_view text, std::string source = "<string>");
    static ConfigFile load(const std::filesystem::path& path);
};

/// The structures a config file can set. Keys are the field names of
/// PairingConfig, LocatorConfig and WorldSpec.
struct ConfigTargets {
    PairingConfig* pairing = nullptr;
    LocatorConfig* locator = nullptr;
    WorldSpec* world = nullptr;
};

/// Applies every entry; unknown keys and unparsable values throw ParseError.
void apply_config(const ConfigFile& cfg, const ConfigTargets& targets);

/// All keys apply_config understands, sorted.
std::vector<std::string> known_config_keys();

}  // namespace wifitrack
