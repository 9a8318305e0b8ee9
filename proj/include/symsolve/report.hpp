#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "symsolve/driver.hpp"

namespace symsolve {

// Structural report: sizes, fill, flops, supernodes and the per-map
// communication bounds for `nprocs` ranks.
std::string analysis_json(const SparseSymMatrix& a, const Analysis& an, int nprocs);

std::string graph_json(const TaskGraph& g);

// `sf` enables the per-supernode traffic-versus-bound section.
std::string stats_json(const RunStats& stats, const RunConfig& cfg, const SymbolicFactor* sf,
                       std::optional<double> residual);

// One JSON record per line: {time, rank, event, id}.
std::string trace_ndjson(const RunStats& stats);

// Header line plus one row of headline numbers.
std::string stats_csv(const RunStats& stats, const RunConfig& cfg, std::optional<double> residual);

// L as a general MatrixMarket coordinate file in the permuted ordering; the
// permutation goes to `path` + ".perm".
void write_factor(const FactorResult& f, const std::filesystem::path& path);

}  // namespace symsolve
