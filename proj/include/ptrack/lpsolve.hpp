#pragma once

#include "ptrack/analysis.hpp"
#include "ptrack/lattice.hpp"
#include "ptrack/paths.hpp"
#include "ptrack/simplex.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <vector>

namespace ptrack {

/// L best node-disjoint paths as a linear program over pair indicators x:
///
///     min c'x   s.t.   G x <= h,   A x = b
///
/// The reduced form keeps G = [A_in; A_out; -I], h = [1; 1; 0] and
/// A = [A_bal; A_cnt(K-2)], b = [0; L]. The full form keeps both bounds on
/// the in/out degrees, x <= 1 and one count row per transition.
struct TrackingProblem {
    Eigen::VectorXd c;
    SparseMatrix G;
    Eigen::VectorXd h;
    SparseMatrix A;
    Eigen::VectorXd b;

    FrameLayout layout;
    std::vector<NodePair> pairs;
    Index paths = 0; // L

    // block sizes
    Index rows_in = 0;      // nodes in frames 1..K-1
    Index rows_out = 0;     // nodes in frames 0..K-2
    Index rows_balance = 0; // nodes in frames 1..K-2
    Index rows_count = 0;   // count rows kept in A
    bool full = false;

    Index size() const { return c.size(); }
};

TrackingProblem build_problem(const PairSet& ps, const FrameLayout& layout, Index L);
TrackingProblem build_problem(const PairSet& ps, const Lattice& lat, Index L);

/// Which rows of A_out the count row for transition r sums.
enum class CountRows {
    /// nodes of frame r (connections r -> r+1)
    by_frame,
    /// A_out rows [sum_{j<=r} N_j, sum_{j<=r+1} N_j) as the summation bounds
    /// are typeset; this is frame r+1 and leaves the last row empty
    as_typeset,
};

TrackingProblem build_full_problem(const PairSet& ps, const FrameLayout& layout, Index L,
                                   CountRows reading = CountRows::by_frame);

/// Per-block nonzero counts. c counts its P entries; h and b count their
/// nonzero values; matrices count stored nonzeros.
struct NonzeroCount {
    Index cost = 0;
    Index in = 0;
    Index out = 0;
    Index neg_identity = 0;
    Index balance = 0;
    Index count = 0;
    Index h = 0;
    Index b = 0;

    Index total() const { return cost + in + out + neg_identity + balance + count + h + b; }
};

NonzeroCount count_nonzeros(const TrackingProblem& p);

/// 2N^2(K-2) + 4P + 2N(K-1) + N + 1 for N nodes in each of K frames.
Index nonzero_formula(Index N, Index K, Index P);

enum class Solver { min_cost_flow, simplex };

/// Integral optimum x* in {0,1}^P. Throws InfeasibleError when L disjoint
/// paths cannot be routed and ConsistencyError if the solver output fails
/// the constraint check.
Eigen::VectorXd solve(const TrackingProblem& p, Solver solver = Solver::min_cost_flow);

struct ConstraintCheck {
    bool integral = false;
    bool inequalities = false;
    bool equalities = false;

    bool ok() const { return integral && inequalities && equalities; }
};

/// Rounds x at 1e-6 and checks G x <= h, A x = b in integer arithmetic.
ConstraintCheck check_solution(const Eigen::VectorXd& x, const TrackingProblem& p);

/// Explains why L paths cannot be routed. Throws the error it builds.
[[noreturn]] void report_infeasible(const FrameLayout& layout, const std::vector<NodePair>& pairs, Index L,
                                    Index achieved);

/// Walks the unit connections of x* from frame 0. Returns L paths of K nodes.
PathSet extract_paths(const Eigen::VectorXd& x, const TrackingProblem& p, const PairSet& ps,
                      const Lattice& lat);

/// build_pairs + build_problem + solve + extract_paths. An empty lattice gives
/// an empty PathSet.
PathSet track_lp(const Lattice& lat, const CostFn& d, Index L, double delta,
                 Solver solver = Solver::min_cost_flow);

} // namespace ptrack
