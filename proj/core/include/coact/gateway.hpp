#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "coact/session.hpp"
#include "coact/trace.hpp"

namespace coact {

inline constexpr const char* kProtocolVersion = "coact-ws/1";

struct GatewayOptions {
  nlohmann::json scenario;  // document before overrides
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_ticks;
  int free_run_period_ms{200};
};

/// Queues one decision per tick for an interactive human.
class QueueDriver : public HumanDriver {
 public:
  std::optional<HumanDecision> next(const HumanView& view) override;

  void set_action(PrimitiveAction action);
  void add_comm(CommAct act);
  bool has_action() const noexcept { return has_action_; }

 private:
  HumanDecision pending_;
  bool has_action_{false};
  bool has_comm_{false};
};

enum class Mode { stepped, free_run };

/// Protocol state machine of one client connection, independent of the
/// transport. Every client message yields the server messages to send and,
/// on a protocol violation, a close reason of the form "CODE: detail".
class GatewaySession {
 public:
  struct Reply {
    std::vector<nlohmann::json> messages;
    std::optional<std::string> close_reason;
  };

  explicit GatewaySession(GatewayOptions options);

  Reply handle(const std::string& text);
  /// One free-run tick: interactive humans without a queued action wait.
  Reply tick_free_run();

  Mode mode() const noexcept { return mode_; }
  int period_ms() const noexcept { return period_ms_; }
  bool started() const noexcept { return session_ != nullptr; }
  bool finished() const noexcept { return session_ && session_->finished(); }
  bool closed() const noexcept { return closed_; }
  const Session* session() const noexcept { return session_.get(); }
  const std::set<EntityId>& interactive() const noexcept { return interactive_; }
  const RunSpec& run_spec() const noexcept { return spec_; }

 private:
  Reply violation(const std::string& code, const std::string& detail);
  Reply on_start(const nlohmann::json& msg);
  Reply on_human_action(const nlohmann::json& msg);
  Reply on_plan_response(const nlohmann::json& msg);
  Reply on_answer(const nlohmann::json& msg);
  Reply on_set_mode(const nlohmann::json& msg);
  std::optional<EntityId> agent_of(const nlohmann::json& msg, Reply& err);
  void advance(Reply& reply);
  nlohmann::json snapshot() const;

  GatewayOptions options_;
  RunSpec spec_;
  std::unique_ptr<Session> session_;
  std::map<EntityId, std::shared_ptr<QueueDriver>> drivers_;
  std::set<EntityId> interactive_;
  Mode mode_{Mode::stepped};
  int period_ms_;
  bool closed_{false};
};

/// Server messages describing one tick record, in protocol order.
std::vector<nlohmann::json> record_messages(const Session& session, const TickRecord& record,
                                            const TickRecord* previous,
                                            const std::set<EntityId>& interactive);

/// WebSocket server; each accepted connection runs its own session.
class GatewayServer {
 public:
  GatewayServer(GatewayOptions options, unsigned short port, int threads = 1);
  ~GatewayServer();
  GatewayServer(const GatewayServer&) = delete;
  GatewayServer& operator=(const GatewayServer&) = delete;

  /// Bound port; useful when constructed with port 0.
  unsigned short port() const noexcept;
  /// Serves on background threads until stop().
  void start();
  /// Serves on the calling thread plus the remaining worker threads; blocks.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace coact
