#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace ptrack {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct LpResult {
    enum class Status { optimal, infeasible, unbounded };
    Status status = Status::infeasible;
    Eigen::VectorXd x;
    double objective = 0.0;
    Eigen::Index pivots = 0;
};

/// min c'x  s.t.  G x <= h,  A x = b.
///
/// Dense two-phase primal simplex with Bland's rule, so the optimum returned
/// is a vertex. Rows of G of the form -x_i <= 0 are taken as sign bounds;
/// every other variable is free. Meant for the small instances used to
/// cross-check the flow solver, not for production sizes.
LpResult solve_lp(const Eigen::VectorXd& c, const SparseMatrix& G, const Eigen::VectorXd& h,
                  const SparseMatrix& A, const Eigen::VectorXd& b);

} // namespace ptrack
