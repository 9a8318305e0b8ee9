#include "symsolve/ordering.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>
#include <string>
#include <utility>

#include "symsolve/error.hpp"

namespace symsolve {

Permutation minimum_degree(const SparseSymMatrix& a) {
  const Index n = a.n;
  std::vector<std::vector<Index>> adj(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    for (Index k = a.col_ptr[j]; k < a.col_ptr[j + 1]; ++k) {
      Index i = a.row_idx[k];
      if (i == j) continue;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  }
  for (auto& nb : adj) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }

  std::set<std::pair<Index, Index>> queue;  // (degree, vertex)
  for (Index v = 0; v < n; ++v) queue.emplace(static_cast<Index>(adj[v].size()), v);

  std::vector<Index> order;
  order.reserve(static_cast<std::size_t>(n));
  std::vector<Index> merged;
  while (!queue.empty()) {
    const Index v = queue.begin()->second;
    queue.erase(queue.begin());
    order.push_back(v);

    const std::vector<Index> clique = std::move(adj[v]);
    adj[v].clear();
    for (Index u : clique) {
      queue.erase({static_cast<Index>(adj[u].size()), u});
      merged.clear();
      std::set_union(adj[u].begin(), adj[u].end(), clique.begin(), clique.end(),
                     std::back_inserter(merged));
      merged.erase(std::remove_if(merged.begin(), merged.end(),
                                  [&](Index w) { return w == u || w == v; }),
                   merged.end());
      adj[u].swap(merged);
      queue.emplace(static_cast<Index>(adj[u].size()), u);
    }
  }
  return Permutation(std::move(order));
}

Permutation natural_order(Index n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "ordering size must be >= 1");
  return Permutation::identity(n);
}

Permutation read_permutation(const std::filesystem::path& path, Index n) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<Index> p;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      p.push_back(static_cast<Index>(std::stoll(line)));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParse, "malformed permutation line: " + line);
    }
  }
  if (static_cast<Index>(p.size()) != n)
    throw Error(ErrorCode::kDimensionMismatch,
                "permutation file has " + std::to_string(p.size()) + " entries, expected " +
                    std::to_string(n));
  return Permutation(std::move(p));
}

void write_permutation(const Permutation& p, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (Index v : p.perm) out << v << '\n';
}

}  // namespace symsolve
