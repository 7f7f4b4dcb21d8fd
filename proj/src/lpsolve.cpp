#include "ptrack/lpsolve.hpp"

#include "min_cost_flow.hpp"
#include "ptrack/errors.hpp"

#include <cmath>
#include <string>

namespace ptrack {
namespace {

using Triplet = Eigen::Triplet<double>;

struct Blocks {
    std::vector<Triplet> in, out, balance;
    std::vector<std::vector<Triplet>> count; // one row per transition
};

Blocks assemble(const PairSet& ps, const FrameLayout& layout, CountRows reading)
{
    const Index K = layout.frame_count();
    const Index n0 = layout.size(0);
    const Index r_out = layout.node_count() - layout.size(K - 1);
    Blocks blk;
    blk.count.resize(std::size_t(K - 1));
    for (Index p = 0; p < ps.size(); ++p) {
        const NodePair& np = ps.pairs[std::size_t(p)];
        const Index kf = layout.frame_of(np.from);
        if (layout.frame_of(np.to) != kf + 1)
            throw InvalidInput("pair does not join adjacent frames");
        blk.in.emplace_back(np.to - n0, p, 1.0);
        blk.out.emplace_back(np.from, p, 1.0);
        // conservation rows belong to frames 1..K-2, indexed from node N_0
        if (layout.frame_of(np.to) <= K - 2)
            blk.balance.emplace_back(np.to - n0, p, 1.0);
        if (kf >= 1)
            blk.balance.emplace_back(np.from - n0, p, -1.0);
        for (Index r = 0; r < K - 1; ++r) {
            bool hit = false;
            if (reading == CountRows::by_frame) {
                hit = kf == r;
            } else {
                const Index a = std::min(layout.offset(r + 1), r_out);
                const Index b = std::min(layout.offset(std::min(r + 2, K)), r_out);
                hit = np.from >= a && np.from < b;
            }
            if (hit)
                blk.count[std::size_t(r)].emplace_back(0, p, 1.0);
        }
    }
    return blk;
}

void append(std::vector<Triplet>& dst, const std::vector<Triplet>& src, Index row_offset, double sign = 1.0)
{
    for (const Triplet& t : src)
        dst.emplace_back(t.row() + row_offset, t.col(), sign * t.value());
}

void identity(std::vector<Triplet>& dst, Index row_offset, Index n, double sign)
{
    for (Index i = 0; i < n; ++i)
        dst.emplace_back(row_offset + i, i, sign);
}

SparseMatrix from_triplets(Index rows, Index cols, const std::vector<Triplet>& t)
{
    SparseMatrix m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

void check_inputs(const PairSet& ps, const FrameLayout& layout, Index L)
{
    if (layout.frame_count() < 2)
        throw InvalidInput("the lattice needs at least two frames");
    if (L < 1)
        throw InvalidInput("L must be at least 1");
    if (ps.costs.size() != ps.size())
        throw InvalidInput("pair and cost counts differ");
}

TrackingProblem skeleton(const PairSet& ps, const FrameLayout& layout, Index L)
{
    TrackingProblem p;
    const Index K = layout.frame_count();
    p.c = ps.costs;
    p.layout = layout;
    p.pairs = ps.pairs;
    p.paths = L;
    p.rows_in = layout.node_count() - layout.size(0);
    p.rows_out = layout.node_count() - layout.size(K - 1);
    p.rows_balance = p.rows_in - layout.size(K - 1);
    return p;
}

Index stored_nonzeros(const SparseMatrix& m, Index row_begin, Index row_end)
{
    Index n = 0;
    for (Index r = row_begin; r < row_end; ++r)
        for (SparseMatrix::InnerIterator it(m, r); it; ++it)
            n += it.value() != 0.0;
    return n;
}

} // namespace

TrackingProblem build_problem(const PairSet& ps, const FrameLayout& layout, Index L)
{
    check_inputs(ps, layout, L);
    TrackingProblem p = skeleton(ps, layout, L);
    const Index P = ps.size();
    const Index K = layout.frame_count();
    const Blocks blk = assemble(ps, layout, CountRows::by_frame);

    std::vector<Triplet> g;
    append(g, blk.in, 0);
    append(g, blk.out, p.rows_in);
    identity(g, p.rows_in + p.rows_out, P, -1.0);
    p.G = from_triplets(p.rows_in + p.rows_out + P, P, g);
    p.h = Eigen::VectorXd::Zero(p.G.rows());
    p.h.head(p.rows_in + p.rows_out).setOnes();

    // only the last count row survives: the others follow from conservation
    std::vector<Triplet> a;
    append(a, blk.balance, 0);
    append(a, blk.count[std::size_t(K - 2)], p.rows_balance);
    p.rows_count = 1;
    p.A = from_triplets(p.rows_balance + 1, P, a);
    p.b = Eigen::VectorXd::Zero(p.A.rows());
    p.b[p.rows_balance] = double(L);
    return p;
}

TrackingProblem build_problem(const PairSet& ps, const Lattice& lat, Index L)
{
    return build_problem(ps, lat.layout(), L);
}

TrackingProblem build_full_problem(const PairSet& ps, const FrameLayout& layout, Index L, CountRows reading)
{
    check_inputs(ps, layout, L);
    TrackingProblem p = skeleton(ps, layout, L);
    p.full = true;
    const Index P = ps.size();
    const Index K = layout.frame_count();
    const Blocks blk = assemble(ps, layout, reading);

    std::vector<Triplet> g;
    Index row = 0;
    append(g, blk.in, row);
    append(g, blk.in, row += p.rows_in, -1.0);
    append(g, blk.out, row += p.rows_in);
    append(g, blk.out, row += p.rows_out, -1.0);
    identity(g, row += p.rows_out, P, 1.0);
    identity(g, row += P, P, -1.0);
    p.G = from_triplets(row + P, P, g);
    p.h = Eigen::VectorXd::Zero(p.G.rows());
    p.h.segment(0, p.rows_in).setOnes();
    p.h.segment(2 * p.rows_in, p.rows_out).setOnes();
    p.h.segment(2 * p.rows_in + 2 * p.rows_out, P).setOnes();

    std::vector<Triplet> a;
    append(a, blk.balance, 0);
    for (Index r = 0; r < K - 1; ++r)
        append(a, blk.count[std::size_t(r)], p.rows_balance + r);
    p.rows_count = K - 1;
    p.A = from_triplets(p.rows_balance + K - 1, P, a);
    p.b = Eigen::VectorXd::Zero(p.A.rows());
    p.b.tail(K - 1).setConstant(double(L));
    return p;
}

NonzeroCount count_nonzeros(const TrackingProblem& p)
{
    if (p.full)
        throw InvalidInput("nonzero accounting is defined for the reduced problem");
    NonzeroCount n;
    const Index P = p.size();
    n.cost = P;
    n.in = stored_nonzeros(p.G, 0, p.rows_in);
    n.out = stored_nonzeros(p.G, p.rows_in, p.rows_in + p.rows_out);
    n.neg_identity = stored_nonzeros(p.G, p.rows_in + p.rows_out, p.G.rows());
    n.balance = stored_nonzeros(p.A, 0, p.rows_balance);
    n.count = stored_nonzeros(p.A, p.rows_balance, p.A.rows());
    n.h = Index((p.h.array() != 0.0).count());
    n.b = Index((p.b.array() != 0.0).count());
    return n;
}

Index nonzero_formula(Index N, Index K, Index P)
{
    return 2 * N * N * (K - 2) + 4 * P + 2 * N * (K - 1) + N + 1;
}

ConstraintCheck check_solution(const Eigen::VectorXd& x, const TrackingProblem& p)
{
    ConstraintCheck chk;
    if (x.size() != p.size())
        return chk;
    std::vector<long long> xi(std::size_t(x.size()));
    chk.integral = true;
    for (Index i = 0; i < x.size(); ++i) {
        xi[std::size_t(i)] = std::llround(x[i]);
        if (!(std::abs(x[i] - double(xi[std::size_t(i)])) <= 1e-6))
            chk.integral = false;
    }
    auto row_sum = [&](const SparseMatrix& m, Index r) {
        long long s = 0;
        for (SparseMatrix::InnerIterator it(m, r); it; ++it)
            s += std::llround(it.value()) * xi[std::size_t(it.col())];
        return s;
    };
    chk.inequalities = true;
    for (Index r = 0; r < p.G.rows(); ++r)
        if (row_sum(p.G, r) > std::llround(p.h[r]))
            chk.inequalities = false;
    chk.equalities = true;
    for (Index r = 0; r < p.A.rows(); ++r)
        if (row_sum(p.A, r) != std::llround(p.b[r]))
            chk.equalities = false;
    return chk;
}

void report_infeasible(const FrameLayout& layout, const std::vector<NodePair>& pairs, Index L, Index achieved)
{
    for (Index k = 0; k < layout.frame_count(); ++k)
        if (layout.size(k) < L)
            throw InfeasibleError("frame " + std::to_string(k) + " has " + std::to_string(layout.size(k)) +
                                      " nodes, fewer than L = " + std::to_string(L),
                                  k, -1, achieved);
    for (Index k = 0; k + 1 < layout.frame_count(); ++k) {
        const Index m = detail::transition_matching(layout, pairs, k);
        if (m < L)
            throw InfeasibleError("transition " + std::to_string(k) + " -> " + std::to_string(k + 1) +
                                      " admits only " + std::to_string(m) + " disjoint connections, fewer than L = " +
                                      std::to_string(L),
                                  -1, k, achieved);
    }
    throw InfeasibleError("only " + std::to_string(achieved) + " disjoint full-length paths exist, fewer than L = " +
                              std::to_string(L),
                          -1, -1, achieved);
}

Eigen::VectorXd solve(const TrackingProblem& p, Solver solver)
{
    Eigen::VectorXd x;
    if (solver == Solver::min_cost_flow) {
        detail::DisjointPathFlow flow(p.layout, p.pairs, p.c);
        const Index achieved = flow.augment(p.paths);
        if (achieved < p.paths)
            report_infeasible(p.layout, p.pairs, p.paths, achieved);
        x = flow.pair_flow();
    } else {
        const LpResult res = solve_lp(p.c, p.G, p.h, p.A, p.b);
        if (res.status == LpResult::Status::infeasible) {
            detail::DisjointPathFlow flow(p.layout, p.pairs, p.c);
            report_infeasible(p.layout, p.pairs, p.paths, flow.augment(p.paths));
        }
        if (res.status != LpResult::Status::optimal)
            throw ConsistencyError("LP reported an unbounded objective on a bounded problem");
        x = res.x;
    }
    if (!check_solution(x, p).ok())
        throw ConsistencyError("solver output violates the constraint system");
    return x.array().round();
}

PathSet extract_paths(const Eigen::VectorXd& x, const TrackingProblem& p, const PairSet& ps, const Lattice& lat)
{
    if (x.size() != p.size() || ps.size() != p.size())
        throw ConsistencyError("solution, problem and pair set sizes differ");
    const FrameLayout& layout = p.layout;
    if (lat.layout().sizes() != layout.sizes())
        throw ConsistencyError("lattice does not match the problem layout");
    const Index M = layout.node_count();
    const Index K = layout.frame_count();
    std::vector<Index> next(std::size_t(M), -1), via(std::size_t(M), -1);
    std::vector<int> indeg(std::size_t(M), 0);
    for (Index q = 0; q < p.size(); ++q) {
        if (std::llround(x[q]) == 0)
            continue;
        if (std::llround(x[q]) != 1)
            throw ConsistencyError("solution entry is not 0 or 1");
        const NodePair& np = p.pairs[std::size_t(q)];
        if (next[std::size_t(np.from)] >= 0 || ++indeg[std::size_t(np.to)] > 1)
            throw ConsistencyError("node has more than one incoming or outgoing connection");
        next[std::size_t(np.from)] = np.to;
        via[std::size_t(np.from)] = q;
    }

    PathSet out;
    out.method = "lp";
    for (Index i = 0; i < layout.size(0); ++i) {
        Index v = layout.index_of(0, i);
        if (next[std::size_t(v)] < 0)
            continue;
        Path path;
        path.nodes.push_back(v);
        while (next[std::size_t(v)] >= 0) {
            path.cost += p.c[via[std::size_t(v)]];
            v = next[std::size_t(v)];
            path.nodes.push_back(v);
        }
        if (Index(path.nodes.size()) != K)
            throw ConsistencyError("path breaks before the last frame");
        out.total_cost += path.cost;
        out.paths.push_back(std::move(path));
    }
    if (out.size() != p.paths)
        throw ConsistencyError("solution does not contain exactly L paths");
    if (std::abs(out.total_cost - p.c.dot(x)) > 1e-9)
        throw ConsistencyError("path costs do not add up to c'x");
    return out;
}

PathSet track_lp(const Lattice& lat, const CostFn& d, Index L, double delta, Solver solver)
{
    if (lat.node_count() == 0) {
        PathSet empty;
        empty.method = "lp";
        return empty;
    }
    const PairSet ps = build_pairs(lat, d, delta);
    const TrackingProblem p = build_problem(ps, lat, L);
    return extract_paths(solve(p, solver), p, ps, lat);
}

} // namespace ptrack
