#include "symsolve/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "symsolve/error.hpp"
#include "symsolve/ordering.hpp"

namespace symsolve {

using nlohmann::json;

namespace {

json by_kind(const std::array<std::int64_t, kMessageKinds>& v) {
  return {{"factor", v[0]}, {"aggregate", v[1]}, {"data", v[2]}};
}

json bounds_json(const SymbolicFactor& sf, MapKind kind, int nprocs) {
  const auto b = comm_bounds(sf, ComputationMap(kind, nprocs));
  json fd = json::array();
  json ad = json::array();
  std::int64_t ft = 0;
  std::int64_t at = 0;
  for (const auto& x : b) {
    fd.push_back(x.factor_dests);
    ad.push_back(x.aggregate_dests);
    ft += x.factor_dests;
    at += x.aggregate_dests;
  }
  return {{"factor_dests_total", ft}, {"aggregate_dests_total", at},
          {"factor_dests", fd}, {"aggregate_dests", ad}};
}

json config_json(const RunConfig& cfg) {
  return {{"nprocs", cfg.nprocs},
          {"map", map_kind_name(cfg.map)},
          {"protocol", protocol_name(cfg.protocol)},
          {"schedule", schedule_name(cfg.schedule)},
          {"send_slots", cfg.send_slots},
          {"recv_slots", cfg.recv_slots},
          {"seed", cfg.seed},
          {"perturbation", cfg.perturbation},
          {"alpha", cfg.cost.alpha},
          {"beta", cfg.cost.beta},
          {"gamma", cfg.cost.gamma}};
}

}  // namespace

std::string analysis_json(const SparseSymMatrix& a, const Analysis& an, int nprocs) {
  const FillStats fs = fill_stats(an.sf);
  json out = {{"n", a.n},
              {"nnz_A", a.nnz_full()},
              {"nnz_A_lower", a.nnz()},
              {"nnz_L", fs.nnz_l},
              {"fill", fs.fill},
              {"flops", fs.flops},
              {"supernodes", an.sf.num_supernodes()},
              {"supernode_histogram", supernode_histogram(an.sf)},
              {"nprocs", nprocs}};
  json bounds;
  for (MapKind k : {MapKind::kFanIn, MapKind::kFanOut, MapKind::kFanBoth})
    bounds[std::string(map_kind_name(k))] = bounds_json(an.sf, k, nprocs);
  out["comm_bounds"] = bounds;
  return out.dump(2);
}

std::string graph_json(const TaskGraph& g) {
  json tasks = json::array();
  for (std::size_t t = 0; t < g.tasks.size(); ++t) {
    const Task& task = g.tasks[t];
    tasks.push_back({{"id", t},
                     {"label", task.label()},
                     {"owner", task.owner},
                     {"deps_in", task.deps_in},
                     {"flops", task.flops},
                     {"local_succ", task.local_succ},
                     {"out_msgs", task.out_msgs}});
  }
  json msgs = json::array();
  for (std::size_t m = 0; m < g.messages.size(); ++m) {
    const auto& d = g.messages[m];
    msgs.push_back({{"id", m},
                    {"kind", message_kind_name(d.kind)},
                    {"src_snode", d.src_snode},
                    {"tgt_snode", d.tgt_snode},
                    {"from", d.from},
                    {"to", d.to},
                    {"bytes", d.bytes},
                    {"producers", d.producers},
                    {"consumers", d.consumers}});
  }
  json out = {{"nprocs", g.nprocs},
              {"supernodes", g.num_supernodes},
              {"edges", g.num_edges()},
              {"tasks", tasks},
              {"messages", msgs}};
  return out.dump(2);
}

std::string stats_json(const RunStats& stats, const RunConfig& cfg, const SymbolicFactor* sf,
                       std::optional<double> residual) {
  json ranks = json::array();
  for (std::size_t r = 0; r < stats.ranks.size(); ++r) {
    const auto& rs = stats.ranks[r];
    ranks.push_back({{"rank", r},
                     {"messages_sent", by_kind(rs.messages_sent)},
                     {"bytes_sent", by_kind(rs.bytes_sent)},
                     {"notifications_sent", rs.notifications_sent},
                     {"tasks_executed", rs.tasks_executed},
                     {"busy_time", rs.busy_time},
                     {"peak_aggregate_bytes", rs.peak_aggregate_bytes}});
  }
  json out = {{"config", config_json(cfg)},
              {"completed", stats.completed()},
              {"makespan", stats.makespan},
              {"tasks_executed", stats.tasks_executed},
              {"messages", by_kind(stats.messages)},
              {"bytes", by_kind(stats.bytes)},
              {"notifications", stats.notifications},
              {"peak_aggregate_bytes", stats.peak_aggregate_bytes},
              {"aggregate_buffers",
               {{"allocated", stats.aggregate_buffers_allocated},
                {"freed", stats.aggregate_buffers_freed},
                {"live", stats.live_aggregate_buffers()}}},
              {"ranks", ranks}};
  out["residual"] = residual ? json(*residual) : json(nullptr);
  if (stats.deadlock)
    out["deadlock"] = {{"cycle", stats.deadlock->cycle}, {"blocked", stats.deadlock->blocked}};
  else
    out["deadlock"] = nullptr;
  if (sf != nullptr) {
    const auto bounds = comm_bounds(*sf, ComputationMap(cfg.map, cfg.nprocs));
    bool within = true;
    std::int64_t max_factor = 0;
    std::int64_t max_aggregate = 0;
    for (std::size_t s = 0; s < bounds.size(); ++s) {
      const auto nf = static_cast<std::int64_t>(stats.factor_receivers[s].size());
      const auto na = static_cast<std::int64_t>(stats.aggregate_senders[s].size());
      within = within && nf <= bounds[s].factor_dests && na <= bounds[s].aggregate_dests;
      max_factor = std::max(max_factor, nf);
      max_aggregate = std::max(max_aggregate, na);
    }
    out["supernodes"] = sf->num_supernodes();
    out["nnz_L"] = fill_stats(*sf).nnz_l;
    out["traffic"] = {{"within_bounds", within},
                      {"max_factor_dests", max_factor},
                      {"max_aggregate_sources", max_aggregate}};
  }
  return out.dump(2);
}

std::string trace_ndjson(const RunStats& stats) {
  std::string out;
  for (const auto& e : stats.trace) {
    out += json{{"time", e.time}, {"rank", e.rank}, {"event", e.event}, {"id", e.id}}.dump();
    out += '\n';
  }
  return out;
}

std::string stats_csv(const RunStats& stats, const RunConfig& cfg, std::optional<double> residual) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "nprocs,map,protocol,schedule,seed,completed,makespan,tasks,factor_msgs,factor_bytes,"
        "aggregate_msgs,aggregate_bytes,notifications,peak_aggregate_bytes,residual\n";
  os << cfg.nprocs << ',' << map_kind_name(cfg.map) << ',' << protocol_name(cfg.protocol) << ','
     << schedule_name(cfg.schedule) << ',' << cfg.seed << ',' << (stats.completed() ? 1 : 0) << ','
     << stats.makespan << ',' << stats.tasks_executed << ','
     << stats.messages_of(MessageKind::kFactor) << ',' << stats.bytes_of(MessageKind::kFactor) << ','
     << stats.messages_of(MessageKind::kAggregate) << ','
     << stats.bytes_of(MessageKind::kAggregate) << ',' << stats.notifications << ','
     << stats.peak_aggregate_bytes << ',';
  if (residual) os << *residual;
  os << '\n';
  return os.str();
}

void write_factor(const FactorResult& f, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  std::size_t nnz = 0;
  for (const Panel& p : f.panels)
    for (Index c = 0; c < p.width; ++c) nnz += static_cast<std::size_t>(p.m() - c);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << f.n() << ' ' << f.n() << ' ' << nnz << '\n';
  out << std::setprecision(17);
  for (const Panel& p : f.panels)
    for (Index c = 0; c < p.width; ++c)
      for (Index r = c; r < p.m(); ++r)
        out << p.rows[r] + 1 << ' ' << p.first_col + c + 1 << ' ' << p(r, c) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
  write_permutation(f.perm, path.string() + ".perm");
}

}  // namespace symsolve
