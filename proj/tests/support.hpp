#pragma once

#include "ptrack/analysis.hpp"
#include "ptrack/lattice.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace ptrack::testing {

/// Lattice whose atoms only carry their local index (in `bin`), paired with a
/// cost function that looks the cost up in per-transition matrices. Lets the
/// trackers run on arbitrary cost tables.
struct TableInstance {
    Lattice lattice;
    TransitionCosts costs;

    CostFn cost_fn() const
    {
        const TransitionCosts* t = &costs;
        return CostFn::custom([t](const ChirpAtom& a, const ChirpAtom& b) {
            return (*t)[std::size_t(a.frame)](a.bin, b.bin);
        });
    }
};

inline TableInstance table_instance(TransitionCosts costs)
{
    TableInstance inst;
    const Index K = Index(costs.size()) + 1;
    inst.lattice.frames.resize(std::size_t(K));
    inst.lattice.hop = 1;
    inst.lattice.fs = 1.0;
    for (Index k = 0; k < K; ++k) {
        const Index n = k + 1 < K ? costs[std::size_t(k)].rows() : costs.back().cols();
        for (Index i = 0; i < n; ++i) {
            ChirpAtom a;
            a.frame = k;
            a.bin = i;
            inst.lattice.frames[std::size_t(k)].push_back(a);
        }
    }
    inst.costs = std::move(costs);
    return inst;
}

/// Every K-tuple (one node per frame) with its summed cost, tuples in
/// lexicographic order.
struct Tuple {
    std::vector<Index> nodes; // local indices
    double cost = 0.0;
};

inline std::vector<Tuple> all_tuples(const TransitionCosts& costs, const std::vector<Index>& sizes)
{
    std::vector<Tuple> out;
    std::vector<Index> cur(sizes.size(), 0);
    if (std::any_of(sizes.begin(), sizes.end(), [](Index n) { return n == 0; }))
        return out;
    while (true) {
        double c = 0.0;
        for (std::size_t k = 0; k + 1 < sizes.size(); ++k)
            c += costs[k](cur[k], cur[k + 1]);
        out.push_back({cur, c});
        std::size_t k = sizes.size();
        while (k > 0) {
            --k;
            if (++cur[k] < sizes[k])
                break;
            cur[k] = 0;
            if (k == 0)
                return out;
        }
    }
}

/// Minimum summed cost over all sets of L node-disjoint full-length tuples,
/// by exhaustive search. +inf when no such set exists.
inline double brute_force_optimum(const TransitionCosts& costs, const std::vector<Index>& sizes, Index L)
{
    const std::vector<Tuple> tuples = all_tuples(costs, sizes);
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::vector<bool>> used;
    for (Index n : sizes)
        used.emplace_back(std::size_t(n), false);

    std::function<void(std::size_t, Index, double)> rec = [&](std::size_t from, Index left, double acc) {
        if (left == 0) {
            best = std::min(best, acc);
            return;
        }
        for (std::size_t t = from; t < tuples.size(); ++t) {
            const Tuple& tp = tuples[t];
            bool ok = std::isfinite(tp.cost);
            for (std::size_t k = 0; ok && k < sizes.size(); ++k)
                ok = !used[k][std::size_t(tp.nodes[k])];
            if (!ok)
                continue;
            for (std::size_t k = 0; k < sizes.size(); ++k)
                used[k][std::size_t(tp.nodes[k])] = true;
            rec(t + 1, left - 1, acc + tp.cost);
            for (std::size_t k = 0; k < sizes.size(); ++k)
                used[k][std::size_t(tp.nodes[k])] = false;
        }
    };
    rec(0, L, 0.0);
    return best;
}

/// Random frame sizes in [1, n_max] for K frames.
inline std::vector<Index> random_sizes(std::mt19937_64& rng, Index K, Index n_max)
{
    std::uniform_int_distribution<Index> n(1, n_max);
    std::vector<Index> sizes(static_cast<std::size_t>(K));
    for (Index& s : sizes)
        s = n(rng);
    return sizes;
}

} // namespace ptrack::testing
