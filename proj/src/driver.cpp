#include "symsolve/driver.hpp"

#include <map>
#include <memory>
#include <string>

#include "symsolve/error.hpp"
#include "symsolve/kernels.hpp"
#include "symsolve/ordering.hpp"

namespace symsolve {

namespace {

// Per-rank numeric state. Data crosses ranks only in deliver().
class CholeskyBody final : public TaskBody {
 public:
  CholeskyBody(const SparseSymMatrix& c, const SymbolicFactor& sf, int nprocs)
      : c_(c), sf_(sf), ranks_(static_cast<std::size_t>(nprocs)) {}

  void execute(const TaskGraph& g, int task, Rank rank) override {
    const Task& t = g.tasks[task];
    RankData& rd = ranks_[rank];
    const Index j = t.id.tgt;
    switch (t.id.kind) {
      case TaskKind::kUpdate: {
        auto it = rd.factors.find(t.id.src);
        if (it == rd.factors.end())
          throw Error(ErrorCode::kProtocol, t.label() + " ran before its factor arrived");
        AggregateVector u = compute_update(*it->second, j, sf_.first_col(j), sf_.width(j), sf_.sn_rows[j]);
        auto acc = rd.accumulators.find(j);
        if (acc == rd.accumulators.end())
          acc = rd.accumulators
                    .emplace(j, zero_aggregate(rank, j, sf_.first_col(j), sf_.width(j),
                                               g.aggregate_rows.at({rank, j})))
                    .first;
        accumulate(acc->second, u);
        break;
      }
      case TaskKind::kAggregate: {
        std::vector<AggregateVector> parts = std::move(rd.inbox[j]);
        rd.inbox.erase(j);
        if (auto acc = rd.accumulators.find(j); acc != rd.accumulators.end()) {
          parts.push_back(std::move(acc->second));
          rd.accumulators.erase(acc);
        }
        rd.updated.emplace(j, apply_aggregates(assemble_panel(c_, sf_, j), parts));
        break;
      }
      case TaskKind::kFactor: {
        Panel p;
        if (auto it = rd.updated.find(j); it != rd.updated.end()) {
          p = std::move(it->second);
          rd.updated.erase(it);
        } else {
          p = assemble_panel(c_, sf_, j);
        }
        rd.factors[j] = std::make_shared<const Panel>(factor_panel(std::move(p)));
        break;
      }
      case TaskKind::kGeneric:
        throw Error(ErrorCode::kInvalidArgument, "generic task in a factorization graph");
    }
  }

  void deliver(const TaskGraph& g, int msg) override {
    const auto& d = g.messages[msg];
    RankData& from = ranks_[d.from];
    RankData& to = ranks_[d.to];
    if (d.kind == MessageKind::kFactor) {
      to.factors[d.src_snode] = from.factors.at(d.src_snode);
    } else if (d.kind == MessageKind::kAggregate) {
      auto it = from.accumulators.find(d.tgt_snode);
      if (it == from.accumulators.end())
        throw Error(ErrorCode::kProtocol, "aggregate fetched after release");
      to.inbox[d.tgt_snode].push_back(it->second);
    }
  }

  void release(const TaskGraph& g, int msg) override {
    const auto& d = g.messages[msg];
    if (ranks_[d.from].accumulators.erase(d.tgt_snode) != 1)
      throw Error(ErrorCode::kProtocol, "aggregate buffer released twice");
  }

  std::vector<Panel> gather(const TaskGraph& g) const {
    std::vector<Panel> panels;
    panels.reserve(static_cast<std::size_t>(sf_.num_supernodes()));
    for (Index s = 0; s < sf_.num_supernodes(); ++s) {
      const Rank r = g.tasks[g.factor_task[s]].owner;
      panels.push_back(*ranks_[r].factors.at(s));
    }
    return panels;
  }

 private:
  struct RankData {
    std::map<Index, std::shared_ptr<const Panel>> factors;
    std::map<Index, AggregateVector> accumulators;  // a^(rank)_tgt
    std::map<Index, std::vector<AggregateVector>> inbox;
    std::map<Index, Panel> updated;
  };

  const SparseSymMatrix& c_;
  const SymbolicFactor& sf_;
  std::vector<RankData> ranks_;
};

}  // namespace

Analysis analyze(const SparseSymMatrix& a, const SolverOptions& opts) {
  Permutation order;
  switch (opts.ordering) {
    case OrderingKind::kMinDegree: order = minimum_degree(a); break;
    case OrderingKind::kNatural: order = natural_order(a.n); break;
    case OrderingKind::kGiven:
      if (!opts.given_perm) throw Error(ErrorCode::kInvalidArgument, "no permutation given");
      if (opts.given_perm->size() != a.n)
        throw Error(ErrorCode::kDimensionMismatch, "permutation length differs from matrix order");
      order = *opts.given_perm;
      break;
  }
  const SparseSymMatrix ordered = permute_symmetric(a, order);
  const Permutation post = postorder_tree(etree(ordered));
  Analysis out;
  out.perm = order.then(post);
  out.permuted = permute_symmetric(a, out.perm);
  out.sf = symbolic_factorize(out.permuted, opts.max_supernode_width);
  return out;
}

std::optional<FactorResult> run_factorization(const SparseSymMatrix& permuted,
                                              const SymbolicFactor& sf, const Permutation& perm,
                                              const TaskGraph& g, const RunConfig& cfg,
                                              RunStats& stats) {
  CholeskyBody body(permuted, sf, cfg.nprocs);
  stats = simulate(g, cfg, body);
  if (!stats.completed()) return std::nullopt;
  return FactorResult{sf, body.gather(g), perm};
}

FactorRun factorize(const SparseSymMatrix& a, const SolverOptions& opts) {
  opts.run.validate();
  FactorRun run;
  run.analysis = analyze(a, opts);
  run.graph = build_task_graph(run.analysis.sf, ComputationMap(opts.run.map, opts.run.nprocs));
  try {
    run.factor = run_factorization(run.analysis.permuted, run.analysis.sf, run.analysis.perm,
                                   run.graph, opts.run, run.stats);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNotPositiveDefinite || e.index() < 0) throw;
    // Report the column in the caller's numbering.
    const Index original = run.analysis.perm.perm[e.index()];
    throw Error(ErrorCode::kNotPositiveDefinite,
                "not-positive-definite at column " + std::to_string(original), original);
  }
  return run;
}

}  // namespace symsolve
