#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsyn/diagnostics.hpp"

namespace gsyn::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kRecordSchema = 1;

// One synth run, stored as a JSON line.
struct RunRecord {
    int schema = kRecordSchema;
    std::string task;
    std::string backend;
    std::string status;
    std::string message;
    double wall_time_s = 0.0;
    nlohmann::json stats = nlohmann::json::object();
    nlohmann::json program;  // null unless the run succeeded
    std::uint64_t seed = 0;
    std::string version = kVersion;
    std::string timestamp;  // UTC, ISO 8601
};

nlohmann::json to_json(const RunRecord& r);
Checked<RunRecord> record_from_json(const nlohmann::json& j);

// The record with wall-clock fields removed (wall_time_s, timestamp and any
// stats key ending in "time_s"), for determinism comparisons.
nlohmann::json without_clock(const RunRecord& r);

// Appends one line with a single write(2) on an O_APPEND descriptor.
// Returns an error message, empty on success.
std::string append_record(const std::string& path, const RunRecord& r);

// Parses a records file; malformed lines are skipped and described in `warnings`.
std::vector<RunRecord> read_records(const std::string& text, std::vector<std::string>& warnings);

// Task x backend grid. A cell shows the fastest successful wall time with one
// decimal, or "-" if the task was run on that backend without success.
std::string render_report(const std::vector<RunRecord>& records);

// Entry point of the gsyn tool; args exclude the program name.
// Exit codes: 0 verified success (or a completed non-synth command),
// 1 synthesis failure, 2 usage, compile or input errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gsyn::cli
