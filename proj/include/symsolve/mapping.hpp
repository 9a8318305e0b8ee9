#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "symsolve/matrix.hpp"

namespace symsolve {

using Rank = int;

enum class MapKind { kFanIn, kFanOut, kFanBoth };

std::string_view map_kind_name(MapKind k);
std::optional<MapKind> parse_map_kind(std::string_view s);

// Closed-form rank generator over the (conceptually unbounded) grid of
// supernode indices; the grid is never materialized.
struct ComputationMap {
  MapKind kind = MapKind::kFanBoth;
  int nprocs = 1;
  // Block side of the fan-both generator: the largest divisor of nprocs that
  // does not exceed sqrt(nprocs).
  int block = 1;

  ComputationMap() = default;
  ComputationMap(MapKind k, int p);

  // FanIn: i mod P. FanOut: j mod P.
  // FanBoth: (i mod r) + r * floor((j mod P) / r).
  Rank operator()(Index i, Index j) const;
};

enum class TaskKind : std::uint8_t { kFactor, kUpdate, kAggregate, kGeneric };

char task_kind_letter(TaskKind k);

// F and A carry src == tgt; U carries src < tgt.
struct TaskId {
  TaskKind kind = TaskKind::kGeneric;
  Index src = 0;
  Index tgt = 0;

  bool operator==(const TaskId&) const = default;
};

Rank owner_of_supernode(Index s, int nprocs);

// F/A of supernode i run on map(i, i). U from source i to target j runs on
// map(i, j), which places fan-in updates with the source column and fan-out
// updates with the target column.
Rank owner_of_task(const TaskId& t, const ComputationMap& m);

}  // namespace symsolve
