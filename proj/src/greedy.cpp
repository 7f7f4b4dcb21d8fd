#include "ptrack/greedy.hpp"

#include "ptrack/errors.hpp"

#include <cmath>
#include <unordered_map>

namespace ptrack {
namespace {

class TupleSearch {
public:
    TupleSearch(std::span<const Eigen::MatrixXd> costs, const std::vector<std::vector<bool>>& used,
                bool prune)
        : costs_(costs), used_(used), prune_(prune), current_(used.size())
    {
    }

    /// Returns false when some frame has no node left.
    bool run()
    {
        for (const auto& frame : used_) {
            bool any = false;
            for (bool u : frame)
                any = any || !u;
            if (!any)
                return false;
        }
        visit(0, 0.0);
        return !best_.empty();
    }

    const std::vector<Index>& best() const { return best_; }
    double best_cost() const { return best_cost_; }
    std::uint64_t evaluated() const { return evaluated_; }

private:
    void visit(std::size_t depth, double partial)
    {
        if (prune_ && !best_.empty() && !(partial < best_cost_))
            return;
        const std::size_t frames = used_.size();
        for (std::size_t i = 0; i < used_[depth].size(); ++i) {
            if (used_[depth][i])
                continue;
            double next = partial;
            if (depth > 0)
                next += costs_[depth - 1](current_[depth - 1], Index(i));
            current_[depth] = Index(i);
            if (depth + 1 == frames) {
                ++evaluated_;
                // strict < keeps the lexicographically first of equal tuples;
                // NaN never wins, +inf wins only over nothing
                if (best_.empty() || next < best_cost_) {
                    best_ = current_;
                    best_cost_ = next;
                }
            } else {
                visit(depth + 1, next);
            }
        }
    }

    std::span<const Eigen::MatrixXd> costs_;
    const std::vector<std::vector<bool>>& used_;
    bool prune_;
    std::vector<Index> current_;
    std::vector<Index> best_;
    double best_cost_ = kInf;
    std::uint64_t evaluated_ = 0;
};

bool all_nonnegative(std::span<const Eigen::MatrixXd> costs)
{
    for (const auto& m : costs)
        for (Index i = 0; i < m.size(); ++i)
            if (m.data()[i] < 0.0 || std::isnan(m.data()[i]))
                return false;
    return true;
}

} // namespace

TupleSelection greedy_tuples(std::span<const Eigen::MatrixXd> costs, Index L, double delta,
                             GreedyOptions opts)
{
    if (costs.empty())
        throw InvalidInput("greedy search needs at least two frames");
    if (L < 0)
        throw InvalidInput("L must be non-negative");
    std::vector<std::vector<bool>> used;
    used.emplace_back(std::size_t(costs.front().rows()), false);
    for (std::size_t k = 0; k < costs.size(); ++k) {
        if (k > 0 && costs[k].rows() != costs[k - 1].cols())
            throw InvalidInput("cost matrices do not chain");
        used.emplace_back(std::size_t(costs[k].cols()), false);
    }
    const bool prune = opts.prune && all_nonnegative(costs);

    TupleSelection sel;
    for (Index l = 0; l < L; ++l) {
        TupleSearch search(costs, used, prune);
        const bool found = search.run();
        sel.candidates.push_back(search.evaluated());
        if (!found)
            break;
        const std::vector<Index>& tuple = search.best();
        for (std::size_t k = 0; k + 1 < tuple.size(); ++k) {
            const double c = costs[k](tuple[k], tuple[k + 1]);
            if (!std::isfinite(c) || c > delta) {
                sel.early_stop = true;
                return sel;
            }
        }
        for (std::size_t k = 0; k < tuple.size(); ++k)
            used[k][std::size_t(tuple[k])] = true;
        sel.tuples.push_back(tuple);
        sel.total_costs.push_back(search.best_cost());
    }
    return sel;
}

TupleSelection greedy_tuples(const Lattice& lat, const CostFn& d, Index L, double delta,
                             Index k_start, Index k_span, GreedyOptions opts)
{
    if (k_span < 2)
        throw InvalidInput("greedy span must cover at least two frames");
    if (k_start < 0 || k_start + k_span > lat.frame_count())
        throw InvalidInput("greedy span exceeds the lattice");
    for (Index k = k_start; k < k_start + k_span; ++k)
        if (lat.frames[std::size_t(k)].empty())
            return {};
    const TransitionCosts costs = transition_costs(lat, d, k_start, k_start + k_span);
    return greedy_tuples(costs, L, delta, opts);
}

PathSet chain_short_paths(const Lattice& lat, const CostFn& d, Index L, double delta, Index k_span,
                          GreedyOptions opts)
{
    if (k_span < 2)
        throw InvalidInput("K_MQ must be at least 2");
    PathSet out;
    out.method = "greedy";
    const FrameLayout layout = lat.layout();
    const Index frames = lat.frame_count();

    // Paths ending on the junction frame, keyed by their last node. Tuples in
    // one span are node-disjoint, so each junction node ends at most one path
    // and starts at most one tuple.
    std::unordered_map<Index, std::size_t> open;
    for (Index start = 0; start + 1 < frames; start += k_span - 1) {
        const Index span = std::min(k_span, frames - start);
        const TupleSelection sel = greedy_tuples(lat, d, L, delta, start, span, opts);
        out.early_stop = out.early_stop || sel.early_stop;
        std::unordered_map<Index, std::size_t> next_open;
        for (const auto& tuple : sel.tuples) {
            std::vector<Index> global(tuple.size());
            for (std::size_t s = 0; s < tuple.size(); ++s)
                global[s] = layout.index_of(start + Index(s), tuple[s]);
            std::size_t id;
            auto it = open.find(global.front());
            if (it != open.end()) {
                id = it->second;
                out.paths[id].nodes.insert(out.paths[id].nodes.end(), global.begin() + 1, global.end());
            } else {
                id = out.paths.size();
                out.paths.push_back(Path{global, 0.0});
            }
            next_open[global.back()] = id;
        }
        open = std::move(next_open);
    }

    for (Path& p : out.paths) {
        p.cost = path_cost(p, lat, layout, d);
        out.total_cost += p.cost;
    }
    return out;
}

} // namespace ptrack
