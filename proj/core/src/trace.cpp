#include "coact/trace.hpp"

#include <openssl/evp.h>

#include <array>
#include <set>
#include <sstream>
#include <stdexcept>

#include "coact/wire.hpp"

namespace coact {

using nlohmann::json;

std::string sha256_hex(const std::string& data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

json trace_header(const RunSpec& spec) {
  return {{"type", "header"},
          {"format", kTraceFormat},
          {"scenario", spec.scenario},
          {"scenario_sha256", sha256_hex(spec.scenario.dump())},
          {"overrides", spec.overrides},
          {"seed", spec.seed},
          {"max_ticks", spec.max_ticks}};
}

TraceWriter::TraceWriter(std::ostream& out, const RunSpec& spec) : out_(out) {
  out_ << trace_header(spec).dump() << '\n';
}

void TraceWriter::record(const TickRecord& rec) {
  json j = to_json(rec);
  j["type"] = "tick";
  out_ << j.dump() << '\n';
}

void TraceWriter::finish(const RunReport& report) {
  json j{{"type", "summary"}, {"report", to_json(report)}};
  out_ << j.dump() << '\n';
  out_.flush();
}

Trace read_trace(std::istream& in) {
  Trace t;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error("trace line " + std::to_string(n) + ": invalid JSON");
    }
    const auto type = j.value("type", std::string{});
    if (n == 1) {
      if (type != "header" || j.value("format", std::string{}) != kTraceFormat)
        throw std::runtime_error("trace line 1: not a " + std::string(kTraceFormat) + " header");
      t.header = std::move(j);
    } else if (type == "tick") {
      t.records.push_back(std::move(j));
    } else if (type == "summary") {
      t.summary = std::move(j);
    } else {
      throw std::runtime_error("trace line " + std::to_string(n) + ": unknown record type '" + type + "'");
    }
  }
  if (t.header.is_null()) throw std::runtime_error("empty trace");
  return t;
}

namespace {

Scenario build(const RunSpec& spec) { return load_scenario(apply_overrides(spec.scenario, spec.overrides)); }

/// Serves the inputs an interactive human gave during the recorded run.
class RecordedDriver : public HumanDriver {
 public:
  RecordedDriver(const Trace& trace, EntityId id) {
    for (const auto& r : trace.records) {
      auto in = r.find("inputs");
      if (in == r.end() || !in->contains(id)) continue;
      // A record at tick t holds decisions made on the world of tick t - 1.
      by_tick_[r.at("tick").get<Tick>() - 1] = decision_from_json((*in)[id]);
    }
  }
  std::optional<HumanDecision> next(const HumanView& view) override {
    auto it = by_tick_.find(view.tick);
    if (it == by_tick_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::map<Tick, HumanDecision> by_tick_;
};

}  // namespace

RunReport run_spec(const RunSpec& spec, std::ostream* trace_out, DriverMap drivers) {
  Session session(build(spec), SessionOptions{spec.seed, spec.max_ticks}, std::move(drivers));
  std::optional<TraceWriter> writer;
  if (trace_out) {
    writer.emplace(*trace_out, spec);
    writer->record(session.records().front());
  }
  while (!session.finished()) {
    const auto& rec = session.step();
    if (writer) writer->record(rec);
  }
  auto report = session.report();
  if (writer) writer->finish(report);
  return report;
}

RunSpec spec_of(const Trace& trace) {
  RunSpec spec;
  spec.scenario = trace.header.at("scenario");
  spec.overrides = trace.header.value("overrides", std::vector<std::string>{});
  spec.seed = trace.header.at("seed").get<std::uint64_t>();
  spec.max_ticks = trace.header.at("max_ticks").get<int>();
  return spec;
}

RunReport report_from_trace(const Trace& trace) {
  const RunSpec spec = spec_of(trace);
  const Scenario sc = build(spec);
  RunReport r;
  r.scenario = sc.name;
  std::set<std::string> facts;
  for (const auto& rec : trace.records) {
    for (const auto& f : rec.at("facts_removed")) facts.erase(f.get<std::string>());
    for (const auto& f : rec.at("facts_added")) facts.insert(f.get<std::string>());
    for (const auto& e : rec.at("events")) {
      const auto actor = e.at("actor").get<std::string>();
      const bool wait = e.at("action").get<std::string>() == "Wait";
      if (e.at("failure").is_null() && !wait) ++r.actions[actor];
      if (wait && sc.world.is_agent(actor) && sc.world.agent(actor).kind == AgentKind::human) ++r.human_idle_ticks;
    }
    for (const auto& c : rec.at("comm")) {
      const auto kind = c.at("kind").get<std::string>();
      ++r.comm_counts[kind];
      if (kind != "Inform" || c.at("sender") != sc.robot || c.at("fact").is_null()) continue;
      ++r.divergences_detected;
      const auto& beliefs = rec.at("beliefs");
      const auto addressee = c.at("addressee").get<std::string>();
      if (!beliefs.contains(addressee)) continue;
      for (const auto& b : beliefs.at(addressee))
        if (b == c.at("fact")) {
          ++r.divergences_resolved;
          break;
        }
    }
    if (rec.at("safety_hold").get<bool>()) ++r.safety_holds;
    const auto plan = rec.at("plan").get<std::string>();
    if (!plan.empty() && (r.plan_ids.empty() || r.plan_ids.back() != plan)) r.plan_ids.push_back(plan);
  }
  r.final_facts.assign(facts.begin(), facts.end());
  r.replans = r.plan_ids.empty() ? 0 : static_cast<int>(r.plan_ids.size()) - 1;
  if (trace.records.empty()) return r;
  const auto& last = trace.records.back();
  r.ticks = last.at("tick").get<Tick>();
  r.goal = last.at("goal").get<std::string>();
  const auto phase = last.at("phase").get<std::string>();
  r.goal_achieved = phase == "achieved";
  if (phase == "achieved") {
    r.outcome = "achieved";
  } else if (phase == "aborted") {
    r.outcome = "aborted";
    const auto t = last.at("transition").is_string() ? last.at("transition").get<std::string>() : std::string{};
    const std::string marker = "aborted: ";
    const auto pos = t.find(marker);
    r.abort_reason = pos == std::string::npos ? std::string{} : t.substr(pos + marker.size());
  } else if (r.ticks >= spec.max_ticks) {
    r.outcome = "timeout";
    r.abort_reason = "TIMEOUT";
  } else {
    r.outcome = "running";
  }
  return r;
}

ReplayResult replay(const Trace& trace) {
  ReplayResult out;
  const RunSpec spec = spec_of(trace);
  if (sha256_hex(spec.scenario.dump()) != trace.header.value("scenario_sha256", std::string{})) {
    out.detail = "scenario hash mismatch";
    return out;
  }
  const Scenario sc = build(spec);
  DriverMap drivers;
  for (const auto& [id, h] : sc.humans)
    if (h.policy == "Interactive") drivers[id] = std::make_shared<RecordedDriver>(trace, id);
  Session session(sc, SessionOptions{spec.seed, spec.max_ticks}, drivers);

  auto compare = [&](const TickRecord& rec, std::size_t i) {
    json mine = to_json(rec);
    mine["type"] = "tick";
    if (i >= trace.records.size()) {
      out.mismatch_tick = rec.tick;
      out.detail = "replay produced more records than the trace";
      return false;
    }
    if (mine != trace.records[i]) {
      out.mismatch_tick = rec.tick;
      for (const auto& [key, val] : mine.items())
        if (!trace.records[i].contains(key) || trace.records[i][key] != val) {
          out.detail = "field '" + key + "' differs";
          break;
        }
      return false;
    }
    return true;
  };
  if (!compare(session.records().front(), 0)) return out;
  std::size_t i = 1;
  while (!session.finished()) {
    if (!compare(session.step(), i++)) return out;
  }
  if (i != trace.records.size()) {
    out.detail = "trace has " + std::to_string(trace.records.size()) + " records, replay produced " +
                 std::to_string(i);
    return out;
  }
  if (trace.summary) {
    const json mine = to_json(session.report());
    if (mine != trace.summary->at("report")) {
      out.detail = "summary differs";
      return out;
    }
  }
  out.ok = true;
  return out;
}

}  // namespace coact
