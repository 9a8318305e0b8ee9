#include "symsolve/mapping.hpp"

#include "symsolve/error.hpp"

namespace symsolve {

std::string_view map_kind_name(MapKind k) {
  switch (k) {
    case MapKind::kFanIn: return "fanin";
    case MapKind::kFanOut: return "fanout";
    case MapKind::kFanBoth: return "fanboth";
  }
  return "?";
}

std::optional<MapKind> parse_map_kind(std::string_view s) {
  if (s == "fanin") return MapKind::kFanIn;
  if (s == "fanout") return MapKind::kFanOut;
  if (s == "fanboth") return MapKind::kFanBoth;
  return std::nullopt;
}

ComputationMap::ComputationMap(MapKind k, int p) : kind(k), nprocs(p) {
  if (p < 1) throw Error(ErrorCode::kInvalidArgument, "processor count must be >= 1");
  for (int r = 1; r * r <= p; ++r)
    if (p % r == 0) block = r;
}

Rank ComputationMap::operator()(Index i, Index j) const {
  const Index p = nprocs;
  switch (kind) {
    case MapKind::kFanIn: return static_cast<Rank>(i % p);
    case MapKind::kFanOut: return static_cast<Rank>(j % p);
    case MapKind::kFanBoth: {
      const Index r = block;
      return static_cast<Rank>(i % r + r * ((j % p) / r));
    }
  }
  return 0;
}

char task_kind_letter(TaskKind k) {
  switch (k) {
    case TaskKind::kFactor: return 'F';
    case TaskKind::kUpdate: return 'U';
    case TaskKind::kAggregate: return 'A';
    case TaskKind::kGeneric: return 'T';
  }
  return '?';
}

Rank owner_of_supernode(Index s, int nprocs) { return static_cast<Rank>(s % nprocs); }

Rank owner_of_task(const TaskId& t, const ComputationMap& m) {
  if (t.kind == TaskKind::kUpdate) return m(t.src, t.tgt);
  return m(t.tgt, t.tgt);
}

}  // namespace symsolve
