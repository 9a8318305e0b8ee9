#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "symsolve/mapping.hpp"
#include "symsolve/taskgraph.hpp"

namespace symsolve {

// Push: eager sends in source-major task order, blocking when the send
// slots are exhausted. PushOrdered: tasks and sends follow the (tgt, src)
// order and a message leaves only while it precedes the next local task.
// Pull: producer signals, consumer polls between tasks and fetches with a
// blocking get, freeing aggregate buffers remotely.
enum class Protocol { kPush, kPushOrdered, kPull };
enum class Schedule { kStatic, kDynamic };

std::string_view protocol_name(Protocol p);
std::optional<Protocol> parse_protocol(std::string_view s);
std::string_view schedule_name(Schedule s);
std::optional<Schedule> parse_schedule(std::string_view s);

struct CostModel {
  double alpha = 1000.0;  // per message or notification
  double beta = 1.0;      // per byte
  double gamma = 0.5;     // per flop
};

// Returns true when `a` should run before `b`.
using TaskPolicy = std::function<bool(const Task& a, const Task& b)>;

struct RunConfig {
  Protocol protocol = Protocol::kPull;
  Schedule schedule = Schedule::kDynamic;
  int nprocs = 1;
  int send_slots = 1;
  int recv_slots = 1;
  MapKind map = MapKind::kFanBoth;
  std::uint64_t seed = 0;
  // Task durations are scaled by a uniform draw from [1, 1 + perturbation].
  double perturbation = 0.0;
  CostModel cost;
  bool record_trace = false;
  // Ready-queue policy for Dynamic; defaults to the (tgt, src) order.
  TaskPolicy dynamic_policy;

  void validate() const;
};

struct TraceEvent {
  double time = 0.0;
  Rank rank = 0;
  std::string event;
  std::string id;

  bool operator==(const TraceEvent&) const = default;
};

struct DeadlockReport {
  std::vector<Rank> cycle;
  // One line per blocked rank.
  std::vector<std::string> blocked;
};

inline constexpr std::size_t kMessageKinds = 3;

struct RankStats {
  std::array<std::int64_t, kMessageKinds> messages_sent{};
  std::array<std::int64_t, kMessageKinds> bytes_sent{};
  std::int64_t notifications_sent = 0;
  std::int64_t tasks_executed = 0;
  double busy_time = 0.0;
  std::int64_t live_aggregate_bytes = 0;
  std::int64_t peak_aggregate_bytes = 0;
};

struct RunStats {
  std::vector<RankStats> ranks;
  std::array<std::int64_t, kMessageKinds> messages{};
  std::array<std::int64_t, kMessageKinds> bytes{};
  std::int64_t notifications = 0;
  std::int64_t tasks_executed = 0;
  double makespan = 0.0;
  // Peak of the summed live aggregate bytes over all ranks.
  std::int64_t peak_aggregate_bytes = 0;
  std::int64_t aggregate_buffers_allocated = 0;
  std::int64_t aggregate_buffers_freed = 0;
  // Per supernode: ranks that received its factor, ranks that shipped an
  // aggregate to it.
  std::vector<std::vector<Rank>> factor_receivers;
  std::vector<std::vector<Rank>> aggregate_senders;
  std::optional<DeadlockReport> deadlock;
  std::vector<TraceEvent> trace;

  bool completed() const { return !deadlock.has_value(); }
  std::int64_t live_aggregate_buffers() const {
    return aggregate_buffers_allocated - aggregate_buffers_freed;
  }
  std::int64_t messages_of(MessageKind k) const { return messages[static_cast<std::size_t>(k)]; }
  std::int64_t bytes_of(MessageKind k) const { return bytes[static_cast<std::size_t>(k)]; }
};

// Numeric side of a run. The simulator decides when things happen; the body
// does the work and moves payloads.
class TaskBody {
 public:
  virtual ~TaskBody() = default;
  virtual void execute(const TaskGraph& g, int task, Rank rank) = 0;
  // Payload of message `msg` now resides on its destination rank.
  virtual void deliver(const TaskGraph& g, int msg) = 0;
  // Producer-side aggregate buffer of `msg` is freed.
  virtual void release(const TaskGraph& g, int msg) = 0;
};

class NullBody final : public TaskBody {
 public:
  void execute(const TaskGraph&, int, Rank) override {}
  void deliver(const TaskGraph&, int) override {}
  void release(const TaskGraph&, int) override {}
};

// Discrete-event simulation of `g` on cfg.nprocs virtual processors. A
// global stall is reported through RunStats::deadlock, not thrown. Errors
// raised by the body (e.g. kNotPositiveDefinite) propagate.
RunStats simulate(const TaskGraph& g, const RunConfig& cfg, TaskBody& body);

// waits_on[r] lists the ranks r is blocked on. Returns a cycle (each rank
// waits on the next, the last on the first) or nullopt.
std::optional<std::vector<Rank>> find_wait_for_cycle(const std::vector<std::vector<Rank>>& waits_on);

}  // namespace symsolve
