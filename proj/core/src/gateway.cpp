#include "coact/gateway.hpp"

#include <boost/asio/dispatch.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <deque>

#include "coact/wire.hpp"

namespace coact {

using nlohmann::json;

// --- driver -------------------------------------------------------------------

std::optional<HumanDecision> QueueDriver::next(const HumanView&) {
  if (!has_action_ && !has_comm_) return std::nullopt;
  HumanDecision d = std::move(pending_);
  if (!has_action_) d.action = PrimitiveAction::wait();
  pending_ = HumanDecision{};
  has_action_ = has_comm_ = false;
  return d;
}

void QueueDriver::set_action(PrimitiveAction action) {
  pending_.action = std::move(action);
  has_action_ = true;
}

void QueueDriver::add_comm(CommAct act) {
  pending_.comm.push_back(std::move(act));
  has_comm_ = true;
}

// --- messages -----------------------------------------------------------------

namespace {

json entities_json(const GridWorld& world) {
  json w = to_json(world);
  return {{"agents", w["agents"]}, {"objects", w["objects"]}};
}

json legal_json(const GridWorld& world, const std::set<EntityId>& agents) {
  json out = json::object();
  for (const auto& id : agents) {
    json list = json::array();
    for (const auto& a : legal_actions(world, id)) list.push_back(a.to_string());
    out[id] = list;
  }
  return out;
}

std::vector<std::string> minus(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::set<std::string> sb(b.begin(), b.end());
  std::vector<std::string> out;
  for (const auto& x : a)
    if (!sb.contains(x)) out.push_back(x);
  return out;
}

}  // namespace

std::vector<json> record_messages(const Session& session, const TickRecord& rec, const TickRecord* prev,
                                  const std::set<EntityId>& interactive) {
  std::vector<json> out;
  json events = to_json(rec)["events"];
  out.push_back({{"type", "stateDelta"},
                 {"tick", rec.tick},
                 {"events", events},
                 {"facts_added", rec.facts_added},
                 {"facts_removed", rec.facts_removed},
                 {"entities", entities_json(session.world())},
                 {"phase", std::string(to_string(rec.phase))},
                 {"transition", rec.transition ? json(*rec.transition) : json(nullptr)},
                 {"safety_hold", rec.safety_hold},
                 {"legal", legal_json(session.world(), interactive)}});
  for (const auto& [id, beliefs] : rec.beliefs) {
    static const std::vector<std::string> kNone;
    const auto& before = prev && prev->beliefs.contains(id) ? prev->beliefs.at(id) : kNone;
    auto added = minus(beliefs, before);
    auto removed = minus(before, beliefs);
    if (added.empty() && removed.empty()) continue;
    out.push_back({{"type", "beliefDiff"}, {"tick", rec.tick}, {"agent", id}, {"added", added}, {"removed", removed}});
  }
  for (const auto& act : rec.comm) {
    out.push_back({{"type", "commAct"}, {"tick", rec.tick}, {"act", to_json(act)}});
    if (act.kind == CommKind::ProposePlan) {
      const auto& plan = session.execution().plan;
      out.push_back({{"type", "planProposal"},
                     {"tick", rec.tick},
                     {"addressee", act.addressee},
                     {"plan_id", act.plan_id},
                     {"summary", to_json(act)["summary"]},
                     {"steps", to_json(act)["steps"]},
                     {"plan", plan && plan->id == act.plan_id ? to_json(*plan) : json(nullptr)}});
    }
  }
  if (!rec.posterior.empty()) out.push_back({{"type", "posterior"}, {"tick", rec.tick}, {"posterior", rec.posterior}});
  const json report = to_json(session.report());
  out.push_back({{"type", "metrics"}, {"tick", rec.tick}, {"report", report}});
  if (session.finished())
    out.push_back({{"type", "terminal"},
                   {"tick", rec.tick},
                   {"outcome", report["outcome"]},
                   {"reason", report["abort_reason"]},
                   {"report", report}});
  return out;
}

// --- protocol -----------------------------------------------------------------

GatewaySession::GatewaySession(GatewayOptions options)
    : options_(std::move(options)), period_ms_(options_.free_run_period_ms) {}

GatewaySession::Reply GatewaySession::violation(const std::string& code, const std::string& detail) {
  closed_ = true;
  Reply r;
  r.messages.push_back({{"type", "error"}, {"code", code}, {"message", detail}});
  r.close_reason = code + ": " + detail;
  return r;
}

GatewaySession::Reply GatewaySession::handle(const std::string& text) {
  if (closed_) return {};
  json msg;
  try {
    msg = json::parse(text);
  } catch (const json::parse_error&) {
    return violation("BAD_JSON", "message is not valid JSON");
  }
  if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string())
    return violation("BAD_MESSAGE", "message needs a string 'type'");
  const auto type = msg["type"].get<std::string>();
  try {
    if (type == "start") return on_start(msg);
    if (type == "setMode") return on_set_mode(msg);
    if (!started()) return violation("NOT_STARTED", "'" + type + "' before start");
    if (type == "humanAction") return on_human_action(msg);
    if (type == "planResponse") return on_plan_response(msg);
    if (type == "answer") return on_answer(msg);
  } catch (const json::exception& e) {
    return violation("BAD_FIELD", e.what());
  } catch (const std::invalid_argument& e) {
    return violation("BAD_FIELD", e.what());
  }
  return violation("UNKNOWN_TYPE", "unknown message type '" + type + "'");
}

GatewaySession::Reply GatewaySession::on_start(const json& msg) {
  if (started()) return violation("ALREADY_STARTED", "session already started");
  if (msg.contains("protocol") && msg["protocol"] != kProtocolVersion)
    return violation("VERSION_MISMATCH", "server speaks " + std::string(kProtocolVersion));
  spec_.scenario = options_.scenario;
  spec_.overrides = options_.overrides;
  std::vector<std::string> ids;
  if (msg.contains("interactive")) ids = msg["interactive"].get<std::vector<std::string>>();
  for (const auto& id : ids) spec_.overrides.push_back("humans/" + id + "/policy=Interactive");
  Scenario probe;
  try {
    probe = load_scenario(apply_overrides(options_.scenario, options_.overrides));
  } catch (const ScenarioError& e) {
    return violation("BAD_SCENARIO", e.what());
  }
  for (const auto& id : ids)
    if (!probe.world.is_agent(id) || probe.world.agent(id).kind != AgentKind::human)
      return violation("BAD_AGENT", "'" + id + "' is not a human");
  Scenario sc;
  try {
    sc = load_scenario(apply_overrides(spec_.scenario, spec_.overrides));
  } catch (const ScenarioError& e) {
    return violation("BAD_SCENARIO", e.what());
  }
  spec_.seed = msg.contains("seed") ? msg["seed"].get<std::uint64_t>() : options_.seed.value_or(sc.seed);
  spec_.max_ticks = options_.max_ticks.value_or(sc.max_ticks);
  if (msg.contains("mode")) {
    Reply r = on_set_mode(msg);
    if (r.close_reason) return r;
  }
  DriverMap drivers;
  for (const auto& [id, h] : sc.humans) {
    if (h.policy != "Interactive") continue;
    auto d = std::make_shared<QueueDriver>();
    drivers_[id] = d;
    drivers[id] = d;
    interactive_.insert(id);
  }
  session_ = std::make_unique<Session>(std::move(sc), SessionOptions{spec_.seed, spec_.max_ticks}, drivers);
  Reply r;
  r.messages.push_back(snapshot());
  const auto& rec = session_->records().front();
  for (auto& m : record_messages(*session_, rec, nullptr, interactive_))
    if (m["type"] != "stateDelta") r.messages.push_back(std::move(m));
  return r;
}

json GatewaySession::snapshot() const {
  const auto& s = *session_;
  json beliefs = json::object();
  for (const auto& [id, m] : s.mentals()) beliefs[id] = m.beliefs.strings();
  return {{"type", "snapshot"},
          {"protocol", kProtocolVersion},
          {"scenario", s.scenario().name},
          {"seed", s.seed()},
          {"max_ticks", s.max_ticks()},
          {"tick", s.world().tick()},
          {"mode", mode_ == Mode::stepped ? "stepped" : "freeRun"},
          {"robot", s.scenario().robot},
          {"interactive", interactive_},
          {"world", to_json(s.world())},
          {"facts", s.facts().strings()},
          {"beliefs", beliefs},
          {"phase", std::string(to_string(s.execution().phase))},
          {"plan", s.execution().plan ? to_json(*s.execution().plan) : json(nullptr)},
          {"legal", legal_json(s.world(), interactive_)}};
}

std::optional<EntityId> GatewaySession::agent_of(const json& msg, Reply& err) {
  if (msg.contains("agent")) {
    const auto id = msg["agent"].get<std::string>();
    if (!interactive_.contains(id)) {
      err = violation("BAD_AGENT", "'" + id + "' is not an interactive human");
      return std::nullopt;
    }
    return id;
  }
  if (interactive_.size() == 1) return *interactive_.begin();
  err = violation("BAD_AGENT", "message needs an 'agent'");
  return std::nullopt;
}

void GatewaySession::advance(Reply& reply) {
  if (session_->finished()) return;
  const TickRecord prev = session_->records().back();
  const TickRecord& rec = session_->step();
  for (auto& m : record_messages(*session_, rec, &prev, interactive_)) reply.messages.push_back(std::move(m));
}

GatewaySession::Reply GatewaySession::on_human_action(const json& msg) {
  if (session_->finished()) return violation("SESSION_FINISHED", "the episode is over");
  PrimitiveAction action;
  try {
    action = PrimitiveAction::parse(msg.at("action").get<std::string>());
  } catch (const std::exception& e) {
    return violation("BAD_ACTION", e.what());
  }
  Reply r;
  if (interactive_.empty()) {
    if (mode_ == Mode::stepped) advance(r);
    return r;
  }
  auto id = agent_of(msg, r);
  if (!id) return r;
  drivers_.at(*id)->set_action(std::move(action));
  if (mode_ == Mode::stepped &&
      std::all_of(drivers_.begin(), drivers_.end(), [](const auto& d) { return d.second->has_action(); }))
    advance(r);
  return r;
}

GatewaySession::Reply GatewaySession::on_plan_response(const json& msg) {
  Reply r;
  auto id = agent_of(msg, r);
  if (!id) return r;
  const auto plan_id = msg.at("plan_id").get<std::string>();
  const bool accept = msg.at("accept").get<bool>();
  const auto& robot = session_->scenario().robot;
  const Tick t = session_->world().tick();
  if (accept) {
    drivers_.at(*id)->add_comm(CommAct::accept_plan(*id, robot, plan_id, t));
  } else {
    NegotiationConstraints c;
    if (msg.contains("constraints")) c = constraints_from_json(msg["constraints"]);
    if (!contradictory_constraints(c).empty())
      return violation("CONTRADICTORY", "constraints require and forbid the same task");
    drivers_.at(*id)->add_comm(CommAct::reject_plan(*id, robot, plan_id, c, t));
  }
  return r;
}

GatewaySession::Reply GatewaySession::on_answer(const json& msg) {
  Reply r;
  auto id = agent_of(msg, r);
  if (!id) return r;
  CommAct act;
  act.kind = CommKind::Answer;
  act.sender = *id;
  act.addressee = msg.value("addressee", session_->scenario().robot);
  act.tick = session_->world().tick();
  for (const auto& f : msg.at("facts")) act.facts.push_back(Fact::parse(f.get<std::string>()));
  drivers_.at(*id)->add_comm(std::move(act));
  return r;
}

GatewaySession::Reply GatewaySession::on_set_mode(const json& msg) {
  const auto mode = msg.at("mode").get<std::string>();
  if (mode == "stepped") {
    mode_ = Mode::stepped;
  } else if (mode == "freeRun") {
    mode_ = Mode::free_run;
  } else {
    return violation("BAD_FIELD", "mode must be stepped or freeRun");
  }
  if (msg.contains("period_ms")) {
    period_ms_ = msg["period_ms"].get<int>();
    if (period_ms_ <= 0) return violation("BAD_FIELD", "period_ms must be positive");
  }
  return {};
}

GatewaySession::Reply GatewaySession::tick_free_run() {
  Reply r;
  if (closed_ || !started() || mode_ != Mode::free_run) return r;
  advance(r);
  return r;
}

// --- transport ----------------------------------------------------------------

namespace {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket&& socket, GatewayOptions options)
      : ws_(std::move(socket)), timer_(ws_.get_executor()), proto_(std::move(options)) {}

  void run() { net::dispatch(ws_.get_executor(), beast::bind_front_handler(&Connection::on_run, shared_from_this())); }

 private:
  void on_run() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(beast::bind_front_handler(&Connection::on_accept, shared_from_this()));
  }

  void on_accept(beast::error_code ec) {
    if (!ec) do_read();
  }

  void do_read() { ws_.async_read(buffer_, beast::bind_front_handler(&Connection::on_read, shared_from_this())); }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      timer_.cancel();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    apply(proto_.handle(text));
    if (!closing_) do_read();
  }

  void apply(GatewaySession::Reply reply) {
    for (auto& m : reply.messages) send(m.dump());
    if (reply.close_reason) {
      closing_ = true;
      close_reason_ = reply.close_reason->substr(0, 120);
      timer_.cancel();
      if (outbox_.empty()) do_close();
      return;
    }
    arm_timer();
  }

  void send(std::string text) {
    outbox_.push_back(std::move(text));
    if (outbox_.size() == 1) do_write();
  }

  void do_write() {
    ws_.text(true);
    ws_.async_write(net::buffer(outbox_.front()), beast::bind_front_handler(&Connection::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) return;
    outbox_.pop_front();
    if (!outbox_.empty()) {
      do_write();
    } else if (closing_) {
      do_close();
    }
  }

  void do_close() {
    ws_.async_close(websocket::close_reason(websocket::close_code::policy_error, close_reason_),
                    [self = shared_from_this()](beast::error_code) {});
  }

  void arm_timer() {
    if (timer_armed_ || closing_ || proto_.mode() != Mode::free_run || !proto_.started() || proto_.finished()) return;
    timer_armed_ = true;
    timer_.expires_after(std::chrono::milliseconds(proto_.period_ms()));
    timer_.async_wait(beast::bind_front_handler(&Connection::on_timer, shared_from_this()));
  }

  void on_timer(beast::error_code ec) {
    timer_armed_ = false;
    if (ec || closing_) return;
    apply(proto_.tick_free_run());
  }

  websocket::stream<beast::tcp_stream> ws_;
  net::steady_timer timer_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  GatewaySession proto_;
  bool closing_{false};
  bool timer_armed_{false};
  std::string close_reason_;
};

class Listener : public std::enable_shared_from_this<Listener> {
 public:
  Listener(net::io_context& ioc, tcp::endpoint endpoint, GatewayOptions options)
      : ioc_(ioc), acceptor_(ioc), options_(std::move(options)) {
    acceptor_.open(endpoint.protocol());
    acceptor_.set_option(net::socket_base::reuse_address(true));
    acceptor_.bind(endpoint);
    acceptor_.listen(net::socket_base::max_listen_connections);
  }

  unsigned short port() const { return acceptor_.local_endpoint().port(); }
  void start() { do_accept(); }
  void stop() {
    beast::error_code ec;
    acceptor_.close(ec);
  }

 private:
  void do_accept() {
    acceptor_.async_accept(net::make_strand(ioc_), beast::bind_front_handler(&Listener::on_accept, shared_from_this()));
  }

  void on_accept(beast::error_code ec, tcp::socket socket) {
    if (ec == net::error::operation_aborted) return;
    if (!ec) std::make_shared<Connection>(std::move(socket), options_)->run();
    do_accept();
  }

  net::io_context& ioc_;
  tcp::acceptor acceptor_;
  GatewayOptions options_;
};

}  // namespace

struct GatewayServer::Impl {
  int threads;
  net::io_context ioc;
  std::shared_ptr<Listener> listener;
  std::vector<std::thread> workers;

  Impl(GatewayOptions options, unsigned short port, int n) : threads(std::max(1, n)), ioc(threads) {
    listener = std::make_shared<Listener>(ioc, tcp::endpoint{net::ip::make_address("127.0.0.1"), port},
                                          std::move(options));
    listener->start();
  }
};

GatewayServer::GatewayServer(GatewayOptions options, unsigned short port, int threads) {
  // Fail early on a broken scenario instead of on the first connection.
  load_scenario(apply_overrides(options.scenario, options.overrides));
  impl_ = std::make_unique<Impl>(std::move(options), port, threads);
}

GatewayServer::~GatewayServer() { stop(); }

unsigned short GatewayServer::port() const noexcept { return impl_->listener->port(); }

void GatewayServer::start() {
  for (int i = 0; i < impl_->threads; ++i) impl_->workers.emplace_back([this] { impl_->ioc.run(); });
}

void GatewayServer::run() {
  for (int i = 1; i < impl_->threads; ++i) impl_->workers.emplace_back([this] { impl_->ioc.run(); });
  impl_->ioc.run();
}

void GatewayServer::stop() {
  if (!impl_) return;
  net::post(impl_->ioc, [l = impl_->listener] { l->stop(); });
  impl_->ioc.stop();
  for (auto& t : impl_->workers)
    if (t.joinable()) t.join();
  impl_->workers.clear();
}

}  // namespace coact
