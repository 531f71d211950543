#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "wifitrack/trace_model.hpp"

namespace wifitrack {

/// Per-file ingestion counters.
struct FileReport {
    std::size_t records = 0;    // valid, non-blank lines
    std::size_t malformed = 0;  // rejected lines
    std::vector<std::string> samples;  // first few rejection messages
};

struct IngestReport {
    FileReport gps;
    FileReport wifi;
};

struct IngestResult {
    TraceSet traces;
    IngestReport report;
};

/// A file may carry one malformed line; beyond that, more than this fraction
/// of malformed lines aborts ingestion.
inline constexpr double kMaxMalformedFraction = 0.01;

/// Reads gps.jsonl / wifi.jsonl. Malformed lines are counted in the report;
/// unreadable files or too many malformed lines throw.
IngestResult ingest_traces(const std::filesystem::path& gps_path,
                           const std::filesystem::path& wifi_path);

/// Parses one line of each format. Throws ParseError on invalid content.
GpsFix parse_gps_line(std::string_view line);
WifiScan parse_wifi_line(std::string_view line);

std::string format_gps_line(const GpsFix& fix);
std::string format_wifi_line(const WifiScan& scan);

/// Writes the canonical JSONL forms, in TraceSet order.
void write_traces(const TraceSet& traces, const std::filesystem::path& gps_path,
                  const std::filesystem::path& wifi_path);

}  // namespace wifitrack
