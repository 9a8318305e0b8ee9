#include "symsolve/fixtures.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "symsolve/error.hpp"
#include "symsolve/symbolic.hpp"

namespace symsolve {

TaskGraph column_tree_graph(const ColumnTree& tree, int nprocs) {
  const int n = static_cast<int>(tree.label.size());
  if (tree.parent.size() != tree.label.size() || tree.owner.size() != tree.label.size())
    throw Error(ErrorCode::kInvalidArgument, "column tree arrays differ in length");
  TaskGraph g;
  g.nprocs = nprocs;
  Index max_label = 0;
  for (Index l : tree.label) max_label = std::max(max_label, l);
  g.num_supernodes = max_label + 1;
  for (int k = 0; k < n; ++k) {
    const int p = tree.parent[k];
    if (p >= n || p == k) throw Error(ErrorCode::kInvalidArgument, "bad parent in column tree");
    if (tree.owner[k] < 0 || tree.owner[k] >= nprocs)
      throw Error(ErrorCode::kInvalidArgument, "column owner out of range");
    Task t;
    t.id = {TaskKind::kGeneric, tree.label[k], p < 0 ? tree.label[k] : tree.label[p]};
    t.owner = tree.owner[k];
    t.flops = kFixtureTaskFlops;
    g.tasks.push_back(std::move(t));
  }
  for (int k = 0; k < n; ++k) {
    const int p = tree.parent[k];
    if (p < 0) continue;
    ++g.tasks[p].deps_in;
    if (tree.owner[k] == tree.owner[p]) {
      g.tasks[k].local_succ.push_back(p);
      continue;
    }
    MessageDescriptor msg;
    msg.kind = MessageKind::kData;
    msg.src_snode = g.tasks[k].id.src;
    msg.tgt_snode = g.tasks[k].id.tgt;
    msg.from = tree.owner[k];
    msg.to = tree.owner[p];
    msg.bytes = kFixtureMessageBytes;
    msg.producers = 1;
    msg.consumers.push_back(p);
    g.messages.push_back(msg);
    g.tasks[k].out_msgs.push_back(static_cast<int>(g.messages.size()) - 1);
  }
  return g;
}

ColumnTree deadlock_tree(int nprocs) {
  if (nprocs < 2)
    throw Error(ErrorCode::kInvalidArgument, "deadlock fixture needs at least 2 processors");
  const Index p = nprocs;
  const Index root = 3 * p + 2;
  std::vector<std::pair<Index, Index>> edges;  // column -> parent column
  for (Index i = 1; i <= p; ++i) edges.emplace_back(i, p + 1);
  for (Index i = 1; i <= p; ++i) edges.emplace_back(p + i, root);
  edges.emplace_back(2 * p + 1, 2 * p + 2);
  edges.emplace_back(2 * p + 2, 2 * p + 3);
  edges.emplace_back(2 * p + 3, root);
  edges.emplace_back(root, kNone);

  ColumnTree tree;
  for (const auto& e : edges) tree.label.push_back(e.first);
  for (const auto& e : edges) {
    const auto it = std::find(tree.label.begin(), tree.label.end(), e.second);
    tree.parent.push_back(e.second == kNone ? -1 : static_cast<int>(it - tree.label.begin()));
    tree.owner.push_back(static_cast<Rank>((e.first - 1) % p));
  }
  return tree;
}

TaskGraph deadlock_fixture(int nprocs) { return column_tree_graph(deadlock_tree(nprocs), nprocs); }

ColumnTree random_postordered_tree(Index n, int nprocs, std::uint64_t seed) {
  if (n < 1 || nprocs < 1) throw Error(ErrorCode::kInvalidArgument, "empty random tree");
  std::mt19937_64 rng(seed);
  EliminationTree t;
  t.parent.assign(static_cast<std::size_t>(n), kNone);
  for (Index c = 0; c + 1 < n; ++c) {
    // Mostly short hops so the trees have some depth.
    const Index span = std::bernoulli_distribution(0.7)(rng) ? std::min<Index>(3, n - 1 - c) : n - 1 - c;
    t.parent[c] = std::uniform_int_distribution<Index>(c + 1, c + span)(rng);
  }
  const Permutation po = postorder_tree(t);
  ColumnTree tree;
  for (Index k = 0; k < n; ++k) {
    const Index old_parent = t.parent[po.perm[k]];
    tree.label.push_back(k);
    tree.parent.push_back(old_parent == kNone ? -1 : static_cast<int>(po.iperm[old_parent]));
    tree.owner.push_back(static_cast<Rank>(k % nprocs));
  }
  return tree;
}

}  // namespace symsolve
