#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coact/session.hpp"

namespace coact {

inline constexpr const char* kTraceFormat = "coact-trace/1";

std::string sha256_hex(const std::string& data);

/// Everything needed to re-run a session exactly.
struct RunSpec {
  nlohmann::json scenario;  // document before overrides
  std::vector<std::string> overrides;
  std::uint64_t seed{1};
  int max_ticks{400};
};

nlohmann::json trace_header(const RunSpec& spec);

/// Streams NDJSON: header line, one line per tick record, summary line.
class TraceWriter {
 public:
  TraceWriter(std::ostream& out, const RunSpec& spec);
  void record(const TickRecord& rec);
  void finish(const RunReport& report);

 private:
  std::ostream& out_;
};

struct Trace {
  nlohmann::json header;
  std::vector<nlohmann::json> records;
  std::optional<nlohmann::json> summary;
};

/// Parses an NDJSON trace; errors name the offending line.
Trace read_trace(std::istream& in);

/// Builds and runs a session from a run spec, optionally writing its trace.
RunReport run_spec(const RunSpec& spec, std::ostream* trace_out = nullptr, DriverMap drivers = {});

/// Recomputes the run report from the header and tick records alone.
RunReport report_from_trace(const Trace& trace);

struct ReplayResult {
  bool ok{false};
  std::optional<std::int64_t> mismatch_tick;
  std::string detail;
};

/// Re-simulates a trace and compares it record by record. Interactive humans
/// replay their recorded inputs.
ReplayResult replay(const Trace& trace);

}  // namespace coact
