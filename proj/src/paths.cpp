#include "ptrack/paths.hpp"

#include "ptrack/errors.hpp"

#include <unordered_set>

namespace ptrack {

double path_cost(const Path& path, const Lattice& lat, const FrameLayout& layout, const CostFn& d)
{
    double sum = 0.0;
    for (std::size_t s = 1; s < path.nodes.size(); ++s)
        sum += d(lat.node(layout, path.nodes[s - 1]), lat.node(layout, path.nodes[s]));
    return sum;
}

bool node_disjoint(const PathSet& ps)
{
    std::unordered_set<Index> seen;
    for (const Path& p : ps.paths)
        for (Index m : p.nodes)
            if (!seen.insert(m).second)
                return false;
    return true;
}

void check_structure(const PathSet& ps, const FrameLayout& layout)
{
    for (const Path& p : ps.paths)
        for (std::size_t s = 1; s < p.nodes.size(); ++s)
            if (layout.frame_of(p.nodes[s]) != layout.frame_of(p.nodes[s - 1]) + 1)
                throw ConsistencyError("path skips or repeats a frame");
    if (!node_disjoint(ps))
        throw ConsistencyError("paths share a node");
}

} // namespace ptrack
