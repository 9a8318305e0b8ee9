#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "symsolve/mapping.hpp"
#include "symsolve/symbolic.hpp"

namespace symsolve {

enum class MessageKind : std::uint8_t { kFactor, kAggregate, kData };

const char* message_kind_name(MessageKind k);

// Scheduling key. Tasks are processed in non-decreasing target, then source;
// A_{j,j} (phase 0) precedes F_{j,j} (phase 1).
struct TaskKey {
  Index tgt = 0;
  Index src = 0;
  int phase = 0;

  auto operator<=>(const TaskKey&) const = default;
};

struct Task {
  TaskId id;
  Rank owner = 0;
  // Initial incoming dependency count: local predecessors plus messages.
  int deps_in = 0;
  std::vector<int> local_succ;
  std::vector<int> out_msgs;
  double flops = 0.0;
  // A tasks: size of the accumulation buffer on the owner rank, 0 when no
  // update is computed locally.
  std::size_t local_buffer_bytes = 0;

  TaskKey key() const {
    return {id.tgt, id.src, id.kind == TaskKind::kFactor ? 1 : 0};
  }
  // Source-major order, the natural column-by-column order.
  TaskKey source_major_key() const {
    return {id.src, id.tgt, id.kind == TaskKind::kFactor ? 1 : 0};
  }
  std::string label() const;
};

struct MessageDescriptor {
  MessageKind kind = MessageKind::kData;
  Index src_snode = 0;
  Index tgt_snode = 0;
  Rank from = 0;
  Rank to = 0;
  std::size_t bytes = 0;
  // Tasks on `from` that must finish before the payload is complete.
  int producers = 0;
  // Tasks on `to` whose counters drop when the payload arrives.
  std::vector<int> consumers;
};

struct TaskGraph {
  int nprocs = 1;
  Index num_supernodes = 0;
  std::vector<Task> tasks;
  std::vector<MessageDescriptor> messages;
  // Per supernode: index of F task, and of A task or -1.
  std::vector<int> factor_task;
  std::vector<int> aggregate_task;
  // Row set of the accumulated aggregate a^(rank)_tgt.
  std::map<std::pair<Rank, Index>, std::vector<Index>> aggregate_rows;

  std::size_t num_edges() const;
  // Throws kInvalidArgument when counters or ownership are inconsistent or a
  // cycle exists.
  void validate() const;
};

TaskGraph build_task_graph(const SymbolicFactor& sf, const ComputationMap& m);

// Targets updated by supernode s, ascending.
std::vector<Index> update_targets(const SymbolicFactor& sf, Index s);

struct CommBound {
  int factor_dests = 0;
  int aggregate_dests = 0;
};

// Upper bounds from the map alone: distinct ranks needing factor i, and
// distinct remote ranks producing aggregates for j.
std::vector<CommBound> comm_bounds(const SymbolicFactor& sf, const ComputationMap& m);

inline constexpr std::size_t kRealBytes = 8;
inline constexpr std::size_t kIndexBytes = 4;

}  // namespace symsolve
