#include "ptrack/lattice.hpp"

#include "ptrack/errors.hpp"

#include <cmath>

namespace ptrack {

double dist_prediction(const ChirpAtom& a, const ChirpAtom& b, double hop)
{
    if (b.frame != a.frame + 1)
        return kInf;
    return std::abs(a.omega + a.psi * hop - b.omega);
}

CostFn CostFn::prediction_error(double hop)
{
    CostFn d;
    d.kind_ = Kind::prediction_error;
    d.hop_ = hop;
    return d;
}

CostFn CostFn::custom(Custom fn)
{
    if (!fn)
        throw InvalidInput("custom cost function is empty");
    CostFn d;
    d.kind_ = Kind::custom;
    d.fn_ = std::move(fn);
    return d;
}

double CostFn::operator()(const ChirpAtom& a, const ChirpAtom& b) const
{
    if (b.frame != a.frame + 1)
        return kInf;
    if (kind_ == Kind::prediction_error)
        return dist_prediction(a, b, hop_);
    return fn_(a, b);
}

TransitionCosts transition_costs(const Lattice& lat, const CostFn& d, Index k_begin, Index k_end)
{
    if (k_end < 0)
        k_end = lat.frame_count();
    if (k_begin < 0 || k_end > lat.frame_count() || k_begin > k_end)
        throw InvalidInput("frame range out of bounds");
    TransitionCosts out;
    for (Index k = k_begin; k + 1 < k_end; ++k) {
        const auto& from = lat.frames[std::size_t(k)];
        const auto& to = lat.frames[std::size_t(k + 1)];
        Eigen::MatrixXd c(Index(from.size()), Index(to.size()));
        for (Index i = 0; i < c.rows(); ++i)
            for (Index j = 0; j < c.cols(); ++j)
                c(i, j) = d(from[std::size_t(i)], to[std::size_t(j)]);
        out.push_back(std::move(c));
    }
    return out;
}

PairSet build_pairs(const FrameLayout& layout, std::span<const Eigen::MatrixXd> costs, double delta)
{
    if (Index(costs.size()) != std::max<Index>(layout.frame_count() - 1, 0))
        throw InvalidInput("need one cost matrix per frame transition");
    PairSet ps;
    ps.delta = delta;
    std::vector<double> c;
    for (Index k = 0; k < Index(costs.size()); ++k) {
        const Eigen::MatrixXd& m = costs[std::size_t(k)];
        if (m.rows() != layout.size(k) || m.cols() != layout.size(k + 1))
            throw InvalidInput("cost matrix shape does not match the frame sizes");
        for (Index i = 0; i < m.rows(); ++i)
            for (Index j = 0; j < m.cols(); ++j)
                if (std::isfinite(m(i, j)) && m(i, j) <= delta) {
                    ps.pairs.push_back({layout.index_of(k, i), layout.index_of(k + 1, j)});
                    c.push_back(m(i, j));
                }
    }
    ps.costs = Eigen::Map<const Eigen::VectorXd>(c.data(), Index(c.size()));
    return ps;
}

PairSet build_pairs(const Lattice& lat, const CostFn& d, double delta)
{
    const TransitionCosts costs = transition_costs(lat, d);
    return build_pairs(lat.layout(), costs, delta);
}

} // namespace ptrack
