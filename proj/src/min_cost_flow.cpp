#include "min_cost_flow.hpp"

#include "ptrack/errors.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <queue>

namespace ptrack::detail {
namespace {
int in_node(Index v) { return int(2 + 2 * v); }
int out_node(Index v) { return int(3 + 2 * v); }
} // namespace

DisjointPathFlow::DisjointPathFlow(const FrameLayout& layout, const std::vector<NodePair>& pairs,
                                   const Eigen::VectorXd& costs)
    : graph_(std::size_t(2 + 2 * layout.node_count())), pair_arc_(pairs.size())
{
    if (Index(pairs.size()) != costs.size())
        throw InvalidInput("pair and cost counts differ");
    const Index K = layout.frame_count();
    for (Index v = 0; v < layout.node_count(); ++v)
        add_arc(in_node(v), out_node(v), 0.0);
    if (K > 0) {
        for (Index i = 0; i < layout.size(0); ++i)
            add_arc(source_, in_node(layout.index_of(0, i)), 0.0);
        for (Index i = 0; i < layout.size(K - 1); ++i)
            add_arc(out_node(layout.index_of(K - 1, i)), sink_, 0.0);
    }
    // insert pair arcs in (from, to) order whatever order the caller used, so
    // tie-breaking between equal-cost optima does not depend on it
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pairs[a] < pairs[b]; });
    for (std::size_t p : order) {
        const NodePair& np = pairs[p];
        if (layout.frame_of(np.to) != layout.frame_of(np.from) + 1)
            throw InvalidInput("pair does not join adjacent frames");
        const int tail = out_node(np.from);
        pair_arc_[p] = {tail, add_arc(tail, in_node(np.to), costs[Index(p)])};
    }
    init_potentials();
}

int DisjointPathFlow::add_arc(int from, int to, double cost)
{
    auto& f = graph_[std::size_t(from)];
    auto& t = graph_[std::size_t(to)];
    f.push_back({to, int(t.size()), 1, cost});
    t.push_back({from, int(f.size()) - 1, 0, -cost});
    return int(f.size()) - 1;
}

void DisjointPathFlow::init_potentials()
{
    // Nodes are numbered source, sink, then in/out per lattice node in
    // frame-major order, so increasing id order is topological apart from the
    // sink, which only has incoming arcs and is relaxed last.
    const std::size_t n = graph_.size();
    potential_.assign(n, kInf);
    potential_[std::size_t(source_)] = 0.0;
    auto relax_from = [&](std::size_t u) {
        if (potential_[u] == kInf)
            return;
        for (const Arc& a : graph_[u])
            if (a.cap > 0 && potential_[u] + a.cost < potential_[std::size_t(a.to)])
                potential_[std::size_t(a.to)] = potential_[u] + a.cost;
    };
    relax_from(std::size_t(source_));
    for (std::size_t u = 2; u < n; ++u)
        relax_from(u);
    for (double& p : potential_)
        if (p == kInf)
            p = 0.0;
}

bool DisjointPathFlow::shortest_path()
{
    const std::size_t n = graph_.size();
    dist_.assign(n, kInf);
    parent_.assign(n, {-1, -1});
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist_[std::size_t(source_)] = 0.0;
    heap.push({0.0, source_});
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > dist_[std::size_t(u)])
            continue;
        const auto& arcs = graph_[std::size_t(u)];
        for (int slot = 0; slot < int(arcs.size()); ++slot) {
            const Arc& a = arcs[std::size_t(slot)];
            if (a.cap == 0)
                continue;
            // reduced costs are >= 0 up to rounding; clamp so Dijkstra stays valid
            const double rc = std::max(0.0, a.cost + potential_[std::size_t(u)] - potential_[std::size_t(a.to)]);
            const double nd = d + rc;
            if (nd < dist_[std::size_t(a.to)]) {
                dist_[std::size_t(a.to)] = nd;
                parent_[std::size_t(a.to)] = {u, slot};
                heap.push({nd, a.to});
            }
        }
    }
    if (dist_[std::size_t(sink_)] == kInf)
        return false;
    for (std::size_t v = 0; v < n; ++v)
        if (dist_[v] < kInf)
            potential_[v] += dist_[v];
    return true;
}

Index DisjointPathFlow::augment(Index units)
{
    Index done = 0;
    for (; done < units; ++done) {
        if (!shortest_path())
            break;
        for (int v = sink_; v != source_;) {
            auto [u, slot] = parent_[std::size_t(v)];
            Arc& a = graph_[std::size_t(u)][std::size_t(slot)];
            a.cap -= 1;
            graph_[std::size_t(a.to)][std::size_t(a.rev)].cap += 1;
            v = u;
        }
    }
    return done;
}

Eigen::VectorXd DisjointPathFlow::pair_flow() const
{
    Eigen::VectorXd x(Index(pair_arc_.size()));
    for (std::size_t p = 0; p < pair_arc_.size(); ++p) {
        auto [tail, slot] = pair_arc_[p];
        x[Index(p)] = graph_[std::size_t(tail)][std::size_t(slot)].cap == 0 ? 1.0 : 0.0;
    }
    return x;
}

Index transition_matching(const FrameLayout& layout, const std::vector<NodePair>& pairs, Index k)
{
    const Index left = layout.size(k);
    const Index right = layout.size(k + 1);
    std::vector<std::vector<Index>> adj(static_cast<std::size_t>(left));
    for (const NodePair& p : pairs)
        if (layout.frame_of(p.from) == k)
            adj[std::size_t(p.from - layout.offset(k))].push_back(p.to - layout.offset(k + 1));
    std::vector<Index> match(std::size_t(right), -1);
    Index size = 0;
    for (Index u = 0; u < left; ++u) {
        std::vector<bool> seen(std::size_t(right), false);
        std::function<bool(Index)> try_augment = [&](Index a) {
            for (Index b : adj[std::size_t(a)]) {
                if (seen[std::size_t(b)])
                    continue;
                seen[std::size_t(b)] = true;
                if (match[std::size_t(b)] < 0 || try_augment(match[std::size_t(b)])) {
                    match[std::size_t(b)] = a;
                    return true;
                }
            }
            return false;
        };
        if (try_augment(u))
            ++size;
    }
    return size;
}

} // namespace ptrack::detail
