#pragma once

#include "ptrack/analysis.hpp"
#include "ptrack/lattice.hpp"

#include <optional>
#include <vector>

namespace ptrack::detail {

/// Unit-capacity network for L node-disjoint frame-spanning paths:
///
///   source -> in(v)        for v in frame 0
///   in(v)  -> out(v)       capacity 1 (one path per node)
///   out(i) -> in(j)        for each admissible pair, cost c_p
///   out(v) -> sink         for v in frame K-1
///
/// Successive shortest paths with Johnson potentials; the initial potentials
/// come from a DAG sweep so negative pair costs are allowed.
class DisjointPathFlow {
public:
    DisjointPathFlow(const FrameLayout& layout, const std::vector<NodePair>& pairs,
                     const Eigen::VectorXd& costs);

    /// Pushes up to `units` augmenting paths; returns how many succeeded.
    Index augment(Index units);

    /// 0/1 flow on each pair, in the order the pairs were given.
    Eigen::VectorXd pair_flow() const;

private:
    struct Arc {
        int to;
        int rev;
        int cap;
        double cost;
    };

    int add_arc(int from, int to, double cost);
    void init_potentials();
    bool shortest_path();

    std::vector<std::vector<Arc>> graph_;
    std::vector<std::pair<int, int>> pair_arc_; // (tail node, arc slot) per pair
    std::vector<double> potential_;
    std::vector<double> dist_;
    std::vector<std::pair<int, int>> parent_;
    int source_ = 0;
    int sink_ = 1;
};

/// Largest number of disjoint connections across k -> k+1 (bipartite matching).
Index transition_matching(const FrameLayout& layout, const std::vector<NodePair>& pairs, Index k);

} // namespace ptrack::detail
