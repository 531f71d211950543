#pragma once

#include <filesystem>

#include "wifitrack/ap_locator.hpp"

namespace wifitrack {

/// apdb.csv: bssid,class,lat,lon,n_sightings,segments_json,contributors_count.
/// Relocated rows leave lat/lon empty and list their segments as a JSON array
/// of {lat,lon,start_ms,end_ms}.
void write_apdb_csv(const ApDatabase& db, const std::filesystem::path& path);

/// Inverse of write_apdb_csv. Contributor identities are not stored, so the
/// loaded records only carry contributor_count.
ApDatabase read_apdb_csv(const std::filesystem::path& path);

}  // namespace wifitrack
