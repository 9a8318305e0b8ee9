#include "symsolve/taskgraph.hpp"

#include <algorithm>
#include <iterator>
#include <set>

#include "symsolve/error.hpp"
#include "symsolve/kernels.hpp"

namespace symsolve {

const char* message_kind_name(MessageKind k) {
  switch (k) {
    case MessageKind::kFactor: return "factor";
    case MessageKind::kAggregate: return "aggregate";
    case MessageKind::kData: return "data";
  }
  return "?";
}

std::string Task::label() const {
  return std::string(1, task_kind_letter(id.kind)) + "(" + std::to_string(id.src) + "," +
         std::to_string(id.tgt) + ")";
}

std::size_t TaskGraph::num_edges() const {
  std::size_t e = 0;
  for (const auto& t : tasks) e += t.local_succ.size();
  for (const auto& m : messages) e += m.consumers.size();
  return e;
}

void TaskGraph::validate() const {
  const int nt = static_cast<int>(tasks.size());
  std::vector<int> indeg(tasks.size(), 0);
  std::vector<std::vector<int>> succ(tasks.size());
  for (int t = 0; t < nt; ++t) {
    const auto& task = tasks[t];
    if (task.owner < 0 || task.owner >= nprocs)
      throw Error(ErrorCode::kInvalidArgument, "task owner out of range");
    for (int s : task.local_succ) {
      if (tasks[s].owner != task.owner)
        throw Error(ErrorCode::kInvalidArgument, "local edge crosses ranks");
      succ[t].push_back(s);
      ++indeg[s];
    }
  }
  std::vector<int> producers(messages.size(), 0);
  for (int t = 0; t < nt; ++t) {
    for (int m : tasks[t].out_msgs) {
      const auto& msg = messages[m];
      if (msg.from != tasks[t].owner)
        throw Error(ErrorCode::kInvalidArgument, "message produced off its source rank");
      ++producers[m];
      for (int c : msg.consumers) {
        succ[t].push_back(c);
      }
    }
  }
  for (std::size_t m = 0; m < messages.size(); ++m) {
    const auto& msg = messages[m];
    if (msg.from == msg.to) throw Error(ErrorCode::kInvalidArgument, "message to self");
    if (producers[m] != msg.producers)
      throw Error(ErrorCode::kInvalidArgument, "message producer count mismatch");
    for (int c : msg.consumers) {
      if (tasks[c].owner != msg.to)
        throw Error(ErrorCode::kInvalidArgument, "message consumer off its target rank");
      ++indeg[c];
    }
  }
  for (int t = 0; t < nt; ++t)
    if (indeg[t] != tasks[t].deps_in)
      throw Error(ErrorCode::kInvalidArgument, "dependency counter mismatch for " + tasks[t].label());

  // Kahn over task->task edges (message edges expanded to every producer).
  std::vector<int> remaining(tasks.size(), 0);
  for (int t = 0; t < nt; ++t)
    for (int s : succ[t]) ++remaining[s];
  std::vector<int> ready;
  for (int t = 0; t < nt; ++t)
    if (remaining[t] == 0) ready.push_back(t);
  int seen = 0;
  while (!ready.empty()) {
    int t = ready.back();
    ready.pop_back();
    ++seen;
    for (int s : succ[t])
      if (--remaining[s] == 0) ready.push_back(s);
  }
  if (seen != nt) throw Error(ErrorCode::kInvalidArgument, "task graph has a cycle");
}

std::vector<Index> update_targets(const SymbolicFactor& sf, Index s) {
  std::vector<Index> targets;
  const auto& rows = sf.sn_rows[s];
  for (std::size_t k = static_cast<std::size_t>(sf.width(s)); k < rows.size(); ++k) {
    Index t = sf.col_to_snode[rows[k]];
    if (targets.empty() || targets.back() != t) targets.push_back(t);
  }
  return targets;
}

TaskGraph build_task_graph(const SymbolicFactor& sf, const ComputationMap& m) {
  const Index ns = sf.num_supernodes();
  TaskGraph g;
  g.nprocs = m.nprocs;
  g.num_supernodes = ns;
  g.factor_task.assign(static_cast<std::size_t>(ns), -1);
  g.aggregate_task.assign(static_cast<std::size_t>(ns), -1);

  std::vector<std::vector<Index>> targets(static_cast<std::size_t>(ns));
  std::vector<std::vector<Index>> sources(static_cast<std::size_t>(ns));
  for (Index i = 0; i < ns; ++i) {
    targets[i] = update_targets(sf, i);
    for (Index j : targets[i]) sources[j].push_back(i);
  }

  auto add_task = [&](TaskKind kind, Index src, Index tgt) {
    Task t;
    t.id = {kind, src, tgt};
    t.owner = owner_of_task(t.id, m);
    g.tasks.push_back(std::move(t));
    return static_cast<int>(g.tasks.size()) - 1;
  };

  // Tasks are created in (tgt, src, phase) order so ids follow the schedule key.
  std::map<std::pair<Index, Index>, int> update_task;
  for (Index j = 0; j < ns; ++j) {
    for (Index i : sources[j]) update_task[{i, j}] = add_task(TaskKind::kUpdate, i, j);
    if (!sources[j].empty()) g.aggregate_task[j] = add_task(TaskKind::kAggregate, j, j);
    g.factor_task[j] = add_task(TaskKind::kFactor, j, j);
  }

  for (Index i = 0; i < ns; ++i) {
    const auto& rows = sf.sn_rows[i];
    const Index m_i = static_cast<Index>(rows.size());
    const Index w_i = sf.width(i);
    Task& f = g.tasks[g.factor_task[i]];
    f.flops = factor_flops(m_i, w_i);

    std::map<Rank, int> factor_msg;
    for (Index j : targets[i]) {
      const int u = update_task.at({i, j});
      Task& ut = g.tasks[u];
      const Index f_j = sf.first_col(j);
      const Index w_j = sf.width(j);
      const auto below = std::lower_bound(rows.begin(), rows.end(), f_j);
      const auto block_end = std::lower_bound(below, rows.end(), f_j + w_j);
      ut.flops = update_flops(w_i, static_cast<Index>(rows.end() - below),
                              static_cast<Index>(block_end - below));

      // Factor delivery.
      Task& fi = g.tasks[g.factor_task[i]];
      if (ut.owner == fi.owner) {
        fi.local_succ.push_back(u);
      } else {
        auto it = factor_msg.find(ut.owner);
        if (it == factor_msg.end()) {
          MessageDescriptor msg;
          msg.kind = MessageKind::kFactor;
          msg.src_snode = i;
          msg.tgt_snode = j;
          msg.from = fi.owner;
          msg.to = ut.owner;
          msg.bytes = static_cast<std::size_t>(m_i * w_i) * kRealBytes +
                      static_cast<std::size_t>(m_i) * kIndexBytes;
          msg.producers = 1;
          g.messages.push_back(msg);
          it = factor_msg.emplace(ut.owner, static_cast<int>(g.messages.size()) - 1).first;
          fi.out_msgs.push_back(it->second);
        }
        g.messages[it->second].consumers.push_back(u);
      }

      // Rows this update contributes to the per-rank accumulation for j.
      auto& acc_rows = g.aggregate_rows[{ut.owner, j}];
      std::vector<Index> merged;
      std::set_union(acc_rows.begin(), acc_rows.end(), below, rows.end(), std::back_inserter(merged));
      acc_rows.swap(merged);
    }
  }

  for (Index j = 0; j < ns; ++j) {
    const int a = g.aggregate_task[j];
    if (a < 0) continue;
    const Rank a_owner = g.tasks[a].owner;
    const Index w_j = sf.width(j);
    std::map<Rank, int> agg_msg;
    for (Index i : sources[j]) {
      const int u = update_task.at({i, j});
      Task& ut = g.tasks[u];
      if (ut.owner == a_owner) {
        ut.local_succ.push_back(a);
        continue;
      }
      auto it = agg_msg.find(ut.owner);
      if (it == agg_msg.end()) {
        const auto& rows = g.aggregate_rows.at({ut.owner, j});
        MessageDescriptor msg;
        msg.kind = MessageKind::kAggregate;
        msg.src_snode = i;
        msg.tgt_snode = j;
        msg.from = ut.owner;
        msg.to = a_owner;
        msg.bytes = rows.size() * static_cast<std::size_t>(w_j) * kRealBytes +
                    rows.size() * kIndexBytes;
        msg.consumers.push_back(a);
        g.messages.push_back(msg);
        it = agg_msg.emplace(ut.owner, static_cast<int>(g.messages.size()) - 1).first;
      }
      ++g.messages[it->second].producers;
      ut.out_msgs.push_back(it->second);
    }
    double entries = 0.0;
    for (const auto& [key, rows] : g.aggregate_rows)
      if (key.second == j) entries += static_cast<double>(rows.size() * static_cast<std::size_t>(w_j));
    g.tasks[a].flops = entries;
    if (auto it = g.aggregate_rows.find({a_owner, j}); it != g.aggregate_rows.end())
      g.tasks[a].local_buffer_bytes = it->second.size() * static_cast<std::size_t>(w_j) * kRealBytes +
                                      it->second.size() * kIndexBytes;
    g.tasks[a].local_succ.push_back(g.factor_task[j]);
  }

  for (auto& t : g.tasks) t.deps_in = 0;
  for (const auto& t : g.tasks)
    for (int s : t.local_succ) ++g.tasks[s].deps_in;
  for (const auto& msg : g.messages)
    for (int c : msg.consumers) ++g.tasks[c].deps_in;
  return g;
}

std::vector<CommBound> comm_bounds(const SymbolicFactor& sf, const ComputationMap& m) {
  const Index ns = sf.num_supernodes();
  std::vector<std::set<Rank>> factor_ranks(static_cast<std::size_t>(ns));
  std::vector<std::set<Rank>> aggregate_ranks(static_cast<std::size_t>(ns));
  for (Index i = 0; i < ns; ++i) {
    for (Index j : update_targets(sf, i)) {
      factor_ranks[i].insert(m(i, j));
      aggregate_ranks[j].insert(m(i, j));
    }
  }
  std::vector<CommBound> out(static_cast<std::size_t>(ns));
  for (Index s = 0; s < ns; ++s) {
    const Rank self = m(s, s);
    out[s].factor_dests = static_cast<int>(factor_ranks[s].size() - factor_ranks[s].count(self));
    out[s].aggregate_dests =
        static_cast<int>(aggregate_ranks[s].size() - aggregate_ranks[s].count(self));
  }
  return out;
}

}  // namespace symsolve
