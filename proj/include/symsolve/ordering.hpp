#pragma once

#include <filesystem>

#include "symsolve/matrix.hpp"

namespace symsolve {

// Fill-reducing ordering by plain minimum (external) degree on the explicit
// elimination graph. Ties go to the smallest original index, so the result is
// deterministic.
Permutation minimum_degree(const SparseSymMatrix& a);

Permutation natural_order(Index n);

// One 0-based index per line, n lines, new -> old.
Permutation read_permutation(const std::filesystem::path& path, Index n);
void write_permutation(const Permutation& p, const std::filesystem::path& path);

}  // namespace symsolve
