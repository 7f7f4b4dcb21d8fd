#pragma once

#include "ptrack/analysis.hpp"
#include "ptrack/lattice.hpp"
#include "ptrack/paths.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ptrack {

struct GreedyOptions {
    /// Branch-and-bound on partial tuple cost. Exact: only tuples that cannot
    /// beat the incumbent (or would lose the lexicographic tie) are skipped.
    /// Disabled automatically when any cost is negative.
    bool prune = true;
};

struct TupleSelection {
    /// Local node index per frame, in selection order.
    std::vector<std::vector<Index>> tuples;
    std::vector<double> total_costs;
    /// Complete tuples evaluated at each selection step. Without pruning
    /// this is prod_k (N_k - l) at step l.
    std::vector<std::uint64_t> candidates;
    /// Stopped because the cheapest remaining tuple had a connection above delta.
    bool early_stop = false;
};

/// Repeatedly takes the cheapest remaining K-tuple (sum of adjacent-pair
/// costs), removes its nodes from their frames and stops after L tuples or
/// when the winner has a connection costing more than `delta`. Ties go to
/// the lexicographically smallest tuple. Non-finite costs always count as
/// above the threshold.
TupleSelection greedy_tuples(std::span<const Eigen::MatrixXd> costs, Index L, double delta,
                             GreedyOptions opts = {});

TupleSelection greedy_tuples(const Lattice& lat, const CostFn& d, Index L, double delta,
                             Index k_start, Index k_span, GreedyOptions opts = {});

/// Runs greedy_tuples over spans of `k_span` frames that overlap by one frame
/// and joins tuples meeting at the shared frame. Tuples that find no
/// predecessor start new paths, so the result may hold fragments.
PathSet chain_short_paths(const Lattice& lat, const CostFn& d, Index L, double delta, Index k_span,
                          GreedyOptions opts = {});

} // namespace ptrack
