#include <CLI11.hpp>

#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>

#include "coact/gateway.hpp"
#include "coact/scenario.hpp"
#include "coact/trace.hpp"
#include "coact/wire.hpp"

namespace {

nlohmann::json read_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw coact::ScenarioError("cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return coact::parse_json_text(ss.str());
}

std::string capitalized(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

struct RunArgs {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_ticks;
  std::string human;
  std::string policy_mode;
  std::vector<std::string> overrides;
  std::string trace;
  std::string report;
};

int cmd_run(const RunArgs& args) {
  coact::RunSpec spec;
  spec.scenario = read_document(args.scenario);
  spec.overrides = args.overrides;
  const auto base = coact::load_scenario(coact::apply_overrides(spec.scenario, spec.overrides));
  if (!args.human.empty())
    for (const auto& id : base.human_ids()) spec.overrides.push_back("humans/" + id + "/policy=" + capitalized(args.human));
  if (!args.policy_mode.empty()) {
    std::string mode = args.policy_mode;
    for (auto& c : mode) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    spec.overrides.push_back("domain/policy/mode=" + mode);
  }
  spec.seed = args.seed.value_or(base.seed);
  spec.max_ticks = args.max_ticks.value_or(base.max_ticks);
  if (spec.max_ticks <= 0) throw std::invalid_argument("--max-ticks must be positive");

  std::ofstream trace_file;
  if (!args.trace.empty()) {
    trace_file.open(args.trace);
    if (!trace_file) throw std::runtime_error("cannot write " + args.trace);
  }
  const auto report = coact::run_spec(spec, args.trace.empty() ? nullptr : &trace_file);
  const auto text = coact::to_json(report).dump(2);
  if (!args.report.empty()) {
    std::ofstream out(args.report);
    if (!out) throw std::runtime_error("cannot write " + args.report);
    out << text << '\n';
  }
  std::cout << text << '\n';
  return 0;
}

int cmd_replay(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace " + path);
  const auto trace = coact::read_trace(in);
  const auto result = coact::replay(trace);
  if (!result.ok) {
    std::cout << "mismatch";
    if (result.mismatch_tick) std::cout << " at tick " << *result.mismatch_tick;
    std::cout << ": " << result.detail << '\n';
    return 1;
  }
  if (trace.summary && coact::to_json(coact::report_from_trace(trace)) != trace.summary->at("report")) {
    std::cout << "mismatch: report does not follow from the trace records\n";
    return 1;
  }
  std::cout << "verified (" << trace.records.size() << " records)\n";
  return 0;
}

struct ServeArgs {
  std::string scenario;
  unsigned short port{8765};
  std::optional<std::uint64_t> seed;
  std::optional<int> max_ticks;
  std::vector<std::string> overrides;
  int threads{1};
  int period_ms{200};
};

int cmd_serve(const ServeArgs& args) {
  coact::GatewayOptions options;
  options.scenario = read_document(args.scenario);
  options.overrides = args.overrides;
  options.seed = args.seed;
  options.max_ticks = args.max_ticks;
  options.free_run_period_ms = args.period_ms;
  coact::GatewayServer server(std::move(options), args.port, args.threads);
  std::cout << "listening on ws://127.0.0.1:" << server.port() << std::endl;
  server.run();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coact: human-robot joint-action simulator"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario headlessly and print its report");
  run_cmd->add_option("scenario", run.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", run.seed, "Run seed (defaults to the scenario seed)");
  run_cmd->add_option("--max-ticks", run.max_ticks, "Tick budget");
  run_cmd->add_option("--human", run.human, "Policy for every human")
      ->check(CLI::IsMember({"cooperative", "distracted", "reluctant", "scripted"}, CLI::ignore_case));
  run_cmd->add_option("--policy-mode", run.policy_mode, "Social policy of the planner")
      ->check(CLI::IsMember({"efficient", "teach", "balanced"}, CLI::ignore_case));
  run_cmd->add_option("--set", run.overrides, "Scenario override path=value (repeatable)");
  run_cmd->add_option("--trace", run.trace, "Write an NDJSON trace");
  run_cmd->add_option("--report", run.report, "Write the report as JSON");

  std::string trace_path;
  auto* replay_cmd = app.add_subcommand("replay", "Re-simulate a trace and verify it");
  replay_cmd->add_option("trace", trace_path, "NDJSON trace")->required()->check(CLI::ExistingFile);

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Expose sessions over WebSocket");
  serve_cmd->add_option("scenario", serve.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--port", serve.port, "TCP port (0 picks a free one)");
  serve_cmd->add_option("--seed", serve.seed, "Default run seed");
  serve_cmd->add_option("--max-ticks", serve.max_ticks, "Tick budget");
  serve_cmd->add_option("--set", serve.overrides, "Scenario override path=value (repeatable)");
  serve_cmd->add_option("--threads", serve.threads, "Worker threads")->check(CLI::PositiveNumber);
  serve_cmd->add_option("--period-ms", serve.period_ms, "Free-run tick period")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return cmd_run(run);
    if (*replay_cmd) return cmd_replay(trace_path);
    if (*serve_cmd) return cmd_serve(serve);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
