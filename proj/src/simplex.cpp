#include "ptrack/simplex.hpp"

#include "ptrack/errors.hpp"

#include <cmath>
#include <vector>

namespace ptrack {
namespace {

constexpr double kEps = 1e-9;

class Tableau {
public:
    Tableau(Eigen::Index rows, Eigen::Index cols) : t_(Eigen::MatrixXd::Zero(rows + 1, cols + 1)), basis_(std::size_t(rows), -1) {}

    double& at(Eigen::Index r, Eigen::Index c) { return t_(r, c); }
    double& rhs(Eigen::Index r) { return t_(r, t_.cols() - 1); }
    double& obj(Eigen::Index c) { return t_(t_.rows() - 1, c); }
    double obj_value() const { return -t_(t_.rows() - 1, t_.cols() - 1); }
    Eigen::Index rows() const { return t_.rows() - 1; }
    Eigen::Index cols() const { return t_.cols() - 1; }
    std::vector<Eigen::Index>& basis() { return basis_; }
    Eigen::Index pivots() const { return pivots_; }

    void pivot(Eigen::Index r, Eigen::Index c)
    {
        t_.row(r) /= t_(r, c);
        for (Eigen::Index i = 0; i < t_.rows(); ++i) {
            if (i == r)
                continue;
            const double f = t_(i, c);
            if (f != 0.0)
                t_.row(i) -= f * t_.row(r);
        }
        basis_[std::size_t(r)] = c;
        ++pivots_;
    }

    /// Bland's rule over columns [0, allowed). Returns false if unbounded.
    bool optimize(Eigen::Index allowed)
    {
        for (;;) {
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < allowed; ++j)
                if (obj(j) < -kEps) {
                    enter = j;
                    break;
                }
            if (enter < 0)
                return true;
            Eigen::Index leave = -1;
            double best = 0.0;
            for (Eigen::Index r = 0; r < rows(); ++r) {
                const double a = at(r, enter);
                if (a <= kEps)
                    continue;
                const double ratio = rhs(r) / a;
                if (leave < 0 || ratio < best - kEps ||
                    (ratio <= best + kEps && basis_[std::size_t(r)] < basis_[std::size_t(leave)])) {
                    leave = r;
                    best = ratio;
                }
            }
            if (leave < 0)
                return false;
            pivot(leave, enter);
        }
    }

private:
    Eigen::MatrixXd t_;
    std::vector<Eigen::Index> basis_;
    Eigen::Index pivots_ = 0;
};

bool is_sign_bound(const SparseMatrix& G, Eigen::Index row, double h, Eigen::Index& var)
{
    if (h != 0.0)
        return false;
    Eigen::Index count = 0;
    for (SparseMatrix::InnerIterator it(G, row); it; ++it) {
        if (it.value() == 0.0)
            continue;
        ++count;
        var = it.col();
        if (it.value() >= 0.0)
            return false;
    }
    return count == 1;
}

} // namespace

LpResult solve_lp(const Eigen::VectorXd& c, const SparseMatrix& G, const Eigen::VectorXd& h,
                  const SparseMatrix& A, const Eigen::VectorXd& b)
{
    using Eigen::Index;
    const Index n = c.size();
    if (G.cols() != n || A.cols() != n || G.rows() != h.size() || A.rows() != b.size())
        throw InvalidInput("LP dimensions do not agree");

    std::vector<bool> nonneg(std::size_t(n), false);
    std::vector<Index> g_rows;
    for (Index r = 0; r < G.rows(); ++r) {
        Index var = -1;
        if (is_sign_bound(G, r, h[r], var))
            nonneg[std::size_t(var)] = true;
        else
            g_rows.push_back(r);
    }

    // standard-form columns: x_i (or x_i+, x_i-), then one slack per kept G row
    std::vector<Index> plus(static_cast<std::size_t>(n)), minus(std::size_t(n), -1);
    Index cols = 0;
    for (Index i = 0; i < n; ++i) {
        plus[std::size_t(i)] = cols++;
        if (!nonneg[std::size_t(i)])
            minus[std::size_t(i)] = cols++;
    }
    const Index slack0 = cols;
    cols += Index(g_rows.size());
    const Index m = Index(g_rows.size()) + A.rows();
    const Index art0 = cols;

    Tableau tab(m, cols + m);
    auto load_row = [&](Index r, const SparseMatrix& M, Index src, double rhs) {
        for (SparseMatrix::InnerIterator it(M, src); it; ++it) {
            tab.at(r, plus[std::size_t(it.col())]) += it.value();
            if (minus[std::size_t(it.col())] >= 0)
                tab.at(r, minus[std::size_t(it.col())]) -= it.value();
        }
        tab.rhs(r) = rhs;
    };
    for (Index r = 0; r < Index(g_rows.size()); ++r) {
        load_row(r, G, g_rows[std::size_t(r)], h[g_rows[std::size_t(r)]]);
        tab.at(r, slack0 + r) = 1.0;
    }
    for (Index r = 0; r < A.rows(); ++r)
        load_row(Index(g_rows.size()) + r, A, r, b[r]);
    for (Index r = 0; r < m; ++r) {
        if (tab.rhs(r) < 0.0)
            for (Index j = 0; j <= cols + m; ++j)
                tab.at(r, j) = -tab.at(r, j);
        tab.at(r, art0 + r) = 1.0;
        tab.basis()[std::size_t(r)] = art0 + r;
    }

    // phase 1: minimise the sum of artificials
    for (Index r = 0; r < m; ++r) {
        for (Index j = 0; j < art0; ++j)
            tab.obj(j) -= tab.at(r, j);
        tab.obj(cols + m) -= tab.rhs(r);
    }
    tab.optimize(art0);
    LpResult res;
    if (tab.obj_value() > 1e-7) {
        res.status = LpResult::Status::infeasible;
        res.pivots = tab.pivots();
        return res;
    }
    for (Index r = 0; r < m; ++r) {
        if (tab.basis()[std::size_t(r)] < art0)
            continue;
        for (Index j = 0; j < art0; ++j)
            if (std::abs(tab.at(r, j)) > kEps) {
                tab.pivot(r, j);
                break;
            }
        // otherwise the row is redundant; its artificial stays basic at zero
    }

    // phase 2
    for (Index j = 0; j <= cols + m; ++j)
        tab.obj(j) = 0.0;
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols);
    for (Index i = 0; i < n; ++i) {
        cost[plus[std::size_t(i)]] = c[i];
        if (minus[std::size_t(i)] >= 0)
            cost[minus[std::size_t(i)]] = -c[i];
    }
    for (Index j = 0; j < cols; ++j)
        tab.obj(j) = cost[j];
    for (Index r = 0; r < m; ++r) {
        const Index bj = tab.basis()[std::size_t(r)];
        if (bj < cols && cost[bj] != 0.0) {
            const double f = cost[bj];
            for (Index j = 0; j <= cols + m; ++j)
                tab.obj(j) -= f * tab.at(r, j);
        }
    }
    if (!tab.optimize(art0)) {
        res.status = LpResult::Status::unbounded;
        res.pivots = tab.pivots();
        return res;
    }

    Eigen::VectorXd z = Eigen::VectorXd::Zero(cols + m);
    for (Index r = 0; r < m; ++r)
        z[tab.basis()[std::size_t(r)]] = tab.rhs(r);
    res.x.resize(n);
    for (Index i = 0; i < n; ++i) {
        res.x[i] = z[plus[std::size_t(i)]];
        if (minus[std::size_t(i)] >= 0)
            res.x[i] -= z[minus[std::size_t(i)]];
    }
    res.objective = c.dot(res.x);
    res.status = LpResult::Status::optimal;
    res.pivots = tab.pivots();
    return res;
}

} // namespace ptrack
