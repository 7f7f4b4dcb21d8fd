#pragma once

#include "ptrack/analysis.hpp"
#include "ptrack/lattice.hpp"

#include <string>
#include <vector>

namespace ptrack {

/// Global node indices in consecutive frames.
struct Path {
    std::vector<Index> nodes;
    double cost = 0.0;
};

struct PathSet {
    std::vector<Path> paths;
    double total_cost = 0.0;
    std::string method;
    /// Greedy only: some span stopped before L tuples because of the threshold.
    bool early_stop = false;

    Index size() const { return Index(paths.size()); }
};

/// Sum of d over consecutive nodes.
double path_cost(const Path& path, const Lattice& lat, const FrameLayout& layout, const CostFn& d);

/// True when no global node index appears in two paths.
bool node_disjoint(const PathSet& ps);

/// Throws ConsistencyError unless every path steps through consecutive
/// frames and the paths are node-disjoint.
void check_structure(const PathSet& ps, const FrameLayout& layout);

} // namespace ptrack
