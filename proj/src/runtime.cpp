#include "symsolve/runtime.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <random>
#include <set>
#include <tuple>

#include "symsolve/error.hpp"

namespace symsolve {

std::string_view protocol_name(Protocol p) {
  switch (p) {
    case Protocol::kPush: return "push";
    case Protocol::kPushOrdered: return "push-ordered";
    case Protocol::kPull: return "pull";
  }
  return "?";
}

std::optional<Protocol> parse_protocol(std::string_view s) {
  for (Protocol p : {Protocol::kPush, Protocol::kPushOrdered, Protocol::kPull})
    if (protocol_name(p) == s) return p;
  return std::nullopt;
}

std::string_view schedule_name(Schedule s) {
  return s == Schedule::kStatic ? "static" : "dynamic";
}

std::optional<Schedule> parse_schedule(std::string_view s) {
  if (s == "static") return Schedule::kStatic;
  if (s == "dynamic") return Schedule::kDynamic;
  return std::nullopt;
}

void RunConfig::validate() const {
  if (nprocs < 1) throw Error(ErrorCode::kInvalidArgument, "processor count must be at least 1");
  if (send_slots < 1 || recv_slots < 1)
    throw Error(ErrorCode::kInvalidArgument, "buffer slots must be at least 1");
  if (!(perturbation >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "perturbation must be >= 0");
  if (!(cost.alpha >= 0.0 && cost.beta >= 0.0 && cost.gamma >= 0.0))
    throw Error(ErrorCode::kInvalidArgument, "cost parameters must be >= 0");
}

std::optional<std::vector<Rank>> find_wait_for_cycle(const std::vector<std::vector<Rank>>& waits_on) {
  const int n = static_cast<int>(waits_on.size());
  std::vector<int> color(waits_on.size(), 0);  // 0 new, 1 on stack, 2 finished
  std::vector<Rank> stack;
  std::vector<std::size_t> next;
  for (Rank root = 0; root < n; ++root) {
    if (color[root] != 0) continue;
    stack.assign(1, root);
    next.assign(1, 0);
    color[root] = 1;
    while (!stack.empty()) {
      const Rank r = stack.back();
      if (next.back() == waits_on[r].size()) {
        color[r] = 2;
        stack.pop_back();
        next.pop_back();
        continue;
      }
      const Rank s = waits_on[r][next.back()++];
      if (s < 0 || s >= n) continue;
      if (color[s] == 1) {
        auto it = std::find(stack.begin(), stack.end(), s);
        return std::vector<Rank>(it, stack.end());
      }
      if (color[s] == 0) {
        color[s] = 1;
        stack.push_back(s);
        next.push_back(0);
      }
    }
  }
  return std::nullopt;
}

namespace {

enum class TaskState { kWaiting, kReady, kRunning, kDone };

enum class MsgState {
  kPending,       // producers still running
  kQueued,        // complete on the producer, not yet sent or signaled
  kInFlight,      // push: sent, receive not posted yet
  kTransferring,  // push: matched
  kSignaled,      // pull: notification travelling
  kNotified,      // pull: in the consumer's notification queue
  kFetching,      // pull: blocking get in progress
  kDelivered,
};

enum class EventType { kTaskDone, kTransferDone, kNotifyArrive, kGetDone, kWake };

struct Event {
  double time;
  std::uint64_t seq;
  EventType type;
  Rank rank;
  int item;

  bool operator>(const Event& o) const { return std::tie(time, seq) > std::tie(o.time, o.seq); }
};

class Simulator {
 public:
  Simulator(const TaskGraph& g, const RunConfig& cfg, TaskBody& body)
      : g_(g), cfg_(cfg), body_(body) {}

  RunStats run();

 private:
  struct MsgLess {
    const Simulator* sim;
    bool operator()(int a, int b) const {
      return std::tie(sim->msg_key_[a], a) < std::tie(sim->msg_key_[b], b);
    }
  };
  struct TaskLess {
    const Simulator* sim;
    bool operator()(int a, int b) const {
      const Task& x = sim->g_.tasks[a];
      const Task& y = sim->g_.tasks[b];
      if (sim->cfg_.dynamic_policy) {
        if (sim->cfg_.dynamic_policy(x, y)) return true;
        if (sim->cfg_.dynamic_policy(y, x)) return false;
        return a < b;
      }
      return std::pair(x.key(), a) < std::pair(y.key(), b);
    }
  };

  struct Proc {
    std::vector<int> order;
    std::size_t cursor = 0;
    std::set<int, TaskLess> rtq;
    bool busy = false;
    bool fetching = false;
    double busy_since = 0.0;
    std::deque<int> blocking_sends;
    std::set<int, MsgLess> outbox;
    std::set<int, MsgLess> incoming;
    std::deque<int> notifications;
    int sends_in_flight = 0;
    int recvs_in_flight = 0;

    Proc(TaskLess tl, MsgLess ml) : rtq(tl), outbox(ml), incoming(ml) {}
  };

  void schedule(double t, EventType type, Rank r, int item) {
    events_.push(Event{t, seq_++, type, r, item});
  }
  void trace(Rank r, const char* ev, std::string id) {
    if (cfg_.record_trace) stats_.trace.push_back(TraceEvent{now_, r, ev, std::move(id)});
  }
  std::string msg_label(int m) const {
    const auto& d = g_.messages[m];
    return std::string(message_kind_name(d.kind)) + "(" + std::to_string(d.src_snode) + "," +
           std::to_string(d.tgt_snode) + ")" + std::to_string(d.from) + "->" + std::to_string(d.to);
  }

  int next_task(Rank r) {
    Proc& p = procs_[r];
    while (p.cursor < p.order.size() && state_[p.order[p.cursor]] == TaskState::kDone) ++p.cursor;
    return p.cursor < p.order.size() ? p.order[p.cursor] : -1;
  }
  bool consumes(int m, int t) const {
    const auto& c = g_.messages[m].consumers;
    return std::find(c.begin(), c.end(), t) != c.end();
  }
  bool send_eligible(Rank r, int m) {
    const int t = next_task(r);
    return t < 0 || msg_key_[m] < g_.tasks[t].key();
  }

  void alloc(Rank r, std::size_t bytes) {
    auto& rs = stats_.ranks[r];
    rs.live_aggregate_bytes += static_cast<std::int64_t>(bytes);
    rs.peak_aggregate_bytes = std::max(rs.peak_aggregate_bytes, rs.live_aggregate_bytes);
    live_total_ += static_cast<std::int64_t>(bytes);
    stats_.peak_aggregate_bytes = std::max(stats_.peak_aggregate_bytes, live_total_);
    ++stats_.aggregate_buffers_allocated;
  }
  void release_bytes(Rank r, std::size_t bytes) {
    stats_.ranks[r].live_aggregate_bytes -= static_cast<std::int64_t>(bytes);
    live_total_ -= static_cast<std::int64_t>(bytes);
    ++stats_.aggregate_buffers_freed;
  }

  void count_message(int m) {
    const auto& d = g_.messages[m];
    const auto k = static_cast<std::size_t>(d.kind);
    ++stats_.messages[k];
    stats_.bytes[k] += static_cast<std::int64_t>(d.bytes);
    ++stats_.ranks[d.from].messages_sent[k];
    stats_.ranks[d.from].bytes_sent[k] += static_cast<std::int64_t>(d.bytes);
  }

  void make_ready(int t) {
    state_[t] = TaskState::kReady;
    procs_[g_.tasks[t].owner].rtq.insert(t);
  }
  void satisfy(int t) {
    if (--deps_[t] == 0) make_ready(t);
  }

  void step(Rank r);
  bool flush_sends(Rank r);
  void start_send(int m);
  void post_receives(Rank r);
  void start_task(Rank r);
  void on_task_done(int t);
  void message_complete(int m);
  void deliver(int m);
  void report_deadlock();

  const TaskGraph& g_;
  const RunConfig& cfg_;
  TaskBody& body_;
  RunStats stats_;
  std::vector<Proc> procs_;
  std::vector<TaskState> state_;
  std::vector<int> deps_;
  std::vector<double> multiplier_;
  std::vector<MsgState> msg_state_;
  std::vector<int> produced_;
  std::vector<TaskKey> msg_key_;
  std::vector<bool> producer_buffer_live_;
  std::vector<bool> local_buffer_live_;
  std::vector<std::vector<int>> delivered_to_task_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::uint64_t seq_ = 0;
  double now_ = 0.0;
  std::int64_t live_total_ = 0;
  std::size_t done_ = 0;
};

RunStats Simulator::run() {
  const int nt = static_cast<int>(g_.tasks.size());
  const int nm = static_cast<int>(g_.messages.size());
  const int np = cfg_.nprocs;
  stats_.ranks.assign(static_cast<std::size_t>(np), RankStats{});
  stats_.factor_receivers.assign(static_cast<std::size_t>(g_.num_supernodes), {});
  stats_.aggregate_senders.assign(static_cast<std::size_t>(g_.num_supernodes), {});

  // A message is ordered as the first task that consumes it, so messages
  // leave in the order their receivers will ask for them.
  msg_key_.resize(static_cast<std::size_t>(nm));
  for (int m = 0; m < nm; ++m) {
    const auto& c = g_.messages[m].consumers;
    if (c.empty() || g_.messages[m].producers < 1)
      throw Error(ErrorCode::kInvalidArgument, "message without producers or consumers");
    TaskKey k = g_.tasks[c.front()].key();
    for (int t : c) k = std::min(k, g_.tasks[t].key());
    msg_key_[m] = k;
  }
  msg_state_.assign(static_cast<std::size_t>(nm), MsgState::kPending);
  produced_.assign(static_cast<std::size_t>(nm), 0);
  producer_buffer_live_.assign(static_cast<std::size_t>(nm), false);
  local_buffer_live_.assign(static_cast<std::size_t>(nt), false);
  delivered_to_task_.assign(static_cast<std::size_t>(nt), {});
  state_.assign(static_cast<std::size_t>(nt), TaskState::kWaiting);
  deps_.resize(static_cast<std::size_t>(nt));

  multiplier_.assign(static_cast<std::size_t>(nt), 1.0);
  if (cfg_.perturbation > 0.0) {
    std::mt19937_64 rng(cfg_.seed);
    std::uniform_real_distribution<double> dist(1.0, 1.0 + cfg_.perturbation);
    for (auto& x : multiplier_) x = dist(rng);
  }

  for (Rank r = 0; r < np; ++r) procs_.emplace_back(TaskLess{this}, MsgLess{this});
  for (int t = 0; t < nt; ++t) procs_[g_.tasks[t].owner].order.push_back(t);
  const bool source_major = cfg_.protocol == Protocol::kPush;
  for (auto& p : procs_) {
    std::sort(p.order.begin(), p.order.end(), [&](int a, int b) {
      const Task& x = g_.tasks[a];
      const Task& y = g_.tasks[b];
      return source_major ? std::pair(x.source_major_key(), a) < std::pair(y.source_major_key(), b)
                          : std::pair(x.key(), a) < std::pair(y.key(), b);
    });
  }
  for (int t = 0; t < nt; ++t) {
    deps_[t] = g_.tasks[t].deps_in;
    if (deps_[t] == 0) make_ready(t);
  }

  for (Rank r = 0; r < np; ++r) schedule(0.0, EventType::kWake, r, -1);
  while (!events_.empty()) {
    const Event e = events_.top();
    events_.pop();
    now_ = e.time;
    switch (e.type) {
      case EventType::kTaskDone:
        on_task_done(e.item);
        break;
      case EventType::kTransferDone: {
        const auto& d = g_.messages[e.item];
        --procs_[d.from].sends_in_flight;
        --procs_[d.to].recvs_in_flight;
        deliver(e.item);
        step(d.from);
        step(d.to);
        break;
      }
      case EventType::kNotifyArrive:
        msg_state_[e.item] = MsgState::kNotified;
        procs_[e.rank].notifications.push_back(e.item);
        step(e.rank);
        break;
      case EventType::kGetDone:
        procs_[e.rank].fetching = false;
        deliver(e.item);
        step(e.rank);
        break;
      case EventType::kWake:
        step(e.rank);
        break;
    }
  }

  if (done_ != g_.tasks.size()) report_deadlock();
  stats_.tasks_executed = static_cast<std::int64_t>(done_);
  for (const auto& rs : stats_.ranks) stats_.notifications += rs.notifications_sent;
  for (auto* v : {&stats_.factor_receivers, &stats_.aggregate_senders})
    for (auto& ranks : *v) {
      std::sort(ranks.begin(), ranks.end());
      ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
    }
  return std::move(stats_);
}

void Simulator::step(Rank r) {
  Proc& p = procs_[r];
  if (p.busy || p.fetching) return;
  if (!flush_sends(r)) return;
  post_receives(r);
  if (cfg_.protocol == Protocol::kPull && !p.notifications.empty()) {
    // Blocking get of the oldest notification.
    const int m = p.notifications.front();
    p.notifications.pop_front();
    if (msg_state_[m] != MsgState::kNotified)
      throw Error(ErrorCode::kProtocol, "fetch of a dangling handle " + msg_label(m));
    msg_state_[m] = MsgState::kFetching;
    p.fetching = true;
    trace(r, "get", msg_label(m));
    schedule(now_ + cfg_.cost.alpha + cfg_.cost.beta * static_cast<double>(g_.messages[m].bytes),
             EventType::kGetDone, r, m);
    return;
  }
  start_task(r);
}

// Returns false while the rank is blocked in a send.
bool Simulator::flush_sends(Rank r) {
  Proc& p = procs_[r];
  if (cfg_.protocol == Protocol::kPush) {
    while (!p.blocking_sends.empty() && p.sends_in_flight < cfg_.send_slots) {
      const int m = p.blocking_sends.front();
      p.blocking_sends.pop_front();
      start_send(m);
    }
    return p.blocking_sends.empty();
  }
  if (cfg_.protocol == Protocol::kPushOrdered) {
    while (!p.outbox.empty()) {
      const int m = *p.outbox.begin();
      if (!send_eligible(r, m)) return true;
      if (p.sends_in_flight >= cfg_.send_slots) return false;
      p.outbox.erase(p.outbox.begin());
      start_send(m);
    }
  }
  return true;
}

void Simulator::start_send(int m) {
  const auto& d = g_.messages[m];
  msg_state_[m] = MsgState::kInFlight;
  ++procs_[d.from].sends_in_flight;
  procs_[d.to].incoming.insert(m);
  count_message(m);
  trace(d.from, "send", msg_label(m));
  schedule(now_, EventType::kWake, d.to, -1);
}

void Simulator::post_receives(Rank r) {
  if (cfg_.protocol == Protocol::kPull) return;
  Proc& p = procs_[r];
  const int t_next = cfg_.schedule == Schedule::kStatic ? next_task(r) : -1;
  for (auto it = p.incoming.begin(); it != p.incoming.end() && p.recvs_in_flight < cfg_.recv_slots;) {
    const int m = *it;
    if (cfg_.schedule == Schedule::kStatic && (t_next < 0 || !consumes(m, t_next))) {
      ++it;
      continue;
    }
    it = p.incoming.erase(it);
    msg_state_[m] = MsgState::kTransferring;
    ++p.recvs_in_flight;
    trace(r, "recv", msg_label(m));
    schedule(now_ + cfg_.cost.alpha + cfg_.cost.beta * static_cast<double>(g_.messages[m].bytes),
             EventType::kTransferDone, r, m);
  }
}

void Simulator::start_task(Rank r) {
  Proc& p = procs_[r];
  int t = -1;
  if (cfg_.schedule == Schedule::kStatic) {
    t = next_task(r);
    if (t < 0 || state_[t] != TaskState::kReady) return;
    p.rtq.erase(t);
  } else {
    if (p.rtq.empty()) return;
    t = *p.rtq.begin();
    p.rtq.erase(p.rtq.begin());
  }
  state_[t] = TaskState::kRunning;
  p.busy = true;
  p.busy_since = now_;
  trace(r, "start", g_.tasks[t].label());
  schedule(now_ + cfg_.cost.gamma * g_.tasks[t].flops * multiplier_[t], EventType::kTaskDone, r, t);
}

void Simulator::on_task_done(int t) {
  const Task& task = g_.tasks[t];
  const Rank r = task.owner;
  Proc& p = procs_[r];
  body_.execute(g_, t, r);
  p.busy = false;
  state_[t] = TaskState::kDone;
  ++done_;
  ++stats_.ranks[r].tasks_executed;
  stats_.ranks[r].busy_time += now_ - p.busy_since;
  stats_.makespan = std::max(stats_.makespan, now_);
  trace(r, "finish", task.label());

  if (task.id.kind == TaskKind::kUpdate) {
    for (int m : task.out_msgs)
      if (g_.messages[m].kind == MessageKind::kAggregate && produced_[m] == 0) {
        producer_buffer_live_[m] = true;
        alloc(r, g_.messages[m].bytes);
      }
    for (int s : task.local_succ)
      if (g_.tasks[s].id.kind == TaskKind::kAggregate && !local_buffer_live_[s] &&
          g_.tasks[s].local_buffer_bytes > 0) {
        local_buffer_live_[s] = true;
        alloc(r, g_.tasks[s].local_buffer_bytes);
      }
  }
  if (task.id.kind == TaskKind::kAggregate) {
    if (local_buffer_live_[t]) {
      local_buffer_live_[t] = false;
      release_bytes(r, task.local_buffer_bytes);
    }
    for (int m : delivered_to_task_[t]) release_bytes(r, g_.messages[m].bytes);
    delivered_to_task_[t].clear();
  }

  for (int s : task.local_succ) satisfy(s);
  for (int m : task.out_msgs)
    if (++produced_[m] == g_.messages[m].producers) message_complete(m);
  step(r);
}

void Simulator::message_complete(int m) {
  const auto& d = g_.messages[m];
  msg_state_[m] = MsgState::kQueued;
  switch (cfg_.protocol) {
    case Protocol::kPush:
      procs_[d.from].blocking_sends.push_back(m);
      break;
    case Protocol::kPushOrdered:
      procs_[d.from].outbox.insert(m);
      break;
    case Protocol::kPull:
      msg_state_[m] = MsgState::kSignaled;
      count_message(m);
      ++stats_.ranks[d.from].notifications_sent;
      trace(d.from, "signal", msg_label(m));
      schedule(now_ + cfg_.cost.alpha, EventType::kNotifyArrive, d.to, m);
      break;
  }
}

void Simulator::deliver(int m) {
  const auto& d = g_.messages[m];
  if (msg_state_[m] == MsgState::kDelivered)
    throw Error(ErrorCode::kProtocol, "message delivered twice " + msg_label(m));
  msg_state_[m] = MsgState::kDelivered;
  body_.deliver(g_, m);
  trace(d.to, "deliver", msg_label(m));
  if (d.kind == MessageKind::kFactor) {
    stats_.factor_receivers[d.src_snode].push_back(d.to);
  } else if (d.kind == MessageKind::kAggregate) {
    stats_.aggregate_senders[d.tgt_snode].push_back(d.from);
    if (!producer_buffer_live_[m])
      throw Error(ErrorCode::kProtocol, "aggregate buffer freed twice " + msg_label(m));
    producer_buffer_live_[m] = false;
    release_bytes(d.from, d.bytes);
    body_.release(g_, m);
    alloc(d.to, d.bytes);
    for (int c : d.consumers) delivered_to_task_[c].push_back(m);
  }
  for (int c : d.consumers) satisfy(c);
}

void Simulator::report_deadlock() {
  const int np = cfg_.nprocs;
  std::vector<std::vector<Rank>> waits_on(static_cast<std::size_t>(np));
  DeadlockReport rep;
  const int nm = static_cast<int>(g_.messages.size());
  auto add_unique = [](std::vector<Rank>& v, Rank r) {
    if (std::find(v.begin(), v.end(), r) == v.end()) v.push_back(r);
  };
  for (Rank r = 0; r < np; ++r) {
    Proc& p = procs_[r];
    const int t_next = next_task(r);
    const bool send_blocked =
        (cfg_.protocol == Protocol::kPush && !p.blocking_sends.empty()) ||
        (cfg_.protocol == Protocol::kPushOrdered && !p.outbox.empty() &&
         send_eligible(r, *p.outbox.begin()));
    if (!send_blocked && t_next < 0) continue;
    std::string line = "rank " + std::to_string(r) + ": ";
    if (send_blocked) {
      for (int m = 0; m < nm; ++m)
        if (msg_state_[m] == MsgState::kInFlight && g_.messages[m].from == r)
          add_unique(waits_on[r], g_.messages[m].to);
      line += "blocked sending";
    } else if (cfg_.schedule == Schedule::kStatic) {
      for (int m = 0; m < nm; ++m)
        if (msg_state_[m] != MsgState::kDelivered && consumes(m, t_next))
          add_unique(waits_on[r], g_.messages[m].from);
      line += "waiting for inputs of " + g_.tasks[t_next].label();
    } else {
      if (!p.rtq.empty()) continue;
      for (int m = 0; m < nm; ++m)
        if (msg_state_[m] != MsgState::kDelivered && g_.messages[m].to == r)
          add_unique(waits_on[r], g_.messages[m].from);
      line += "ready queue empty";
    }
    line += " (waits on";
    for (Rank s : waits_on[r]) line += " " + std::to_string(s);
    line += ")";
    rep.blocked.push_back(std::move(line));
  }
  if (auto cycle = find_wait_for_cycle(waits_on)) rep.cycle = std::move(*cycle);
  stats_.deadlock = std::move(rep);
}

}  // namespace

RunStats simulate(const TaskGraph& g, const RunConfig& cfg, TaskBody& body) {
  cfg.validate();
  if (g.nprocs != cfg.nprocs)
    throw Error(ErrorCode::kInvalidArgument, "task graph built for " + std::to_string(g.nprocs) +
                                                 " processors, run configured for " +
                                                 std::to_string(cfg.nprocs));
  Simulator sim(g, cfg, body);
  return sim.run();
}

}  // namespace symsolve
