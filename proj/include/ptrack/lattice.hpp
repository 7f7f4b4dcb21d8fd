#pragma once

#include "ptrack/analysis.hpp"

#include <Eigen/Core>

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace ptrack {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// |omega_a + psi_a H - omega_b|: how far b's frequency is from the value
/// predicted one hop ahead by a. +inf unless b sits in the frame after a.
double dist_prediction(const ChirpAtom& a, const ChirpAtom& b, double hop);

/// Distance between atoms in adjacent frames; +inf for every other pair.
class CostFn {
public:
    enum class Kind { prediction_error, custom };
    using Custom = std::function<double(const ChirpAtom&, const ChirpAtom&)>;

    static CostFn prediction_error(double hop);
    /// `fn` is only consulted for adjacent-frame pairs.
    static CostFn custom(Custom fn);

    Kind kind() const { return kind_; }
    double hop() const { return hop_; }
    double operator()(const ChirpAtom& a, const ChirpAtom& b) const;

private:
    Kind kind_ = Kind::prediction_error;
    double hop_ = 0.0;
    Custom fn_;
};

/// One matrix per frame transition k -> k+1 (N_k x N_{k+1}).
using TransitionCosts = std::vector<Eigen::MatrixXd>;

TransitionCosts transition_costs(const Lattice& lat, const CostFn& d, Index k_begin = 0,
                                 Index k_end = -1);

struct NodePair {
    Index from = 0;
    Index to = 0;

    friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

/// Admissible connections rho and their costs. Position p in `pairs` is the
/// solution-vector index of that pair.
struct PairSet {
    std::vector<NodePair> pairs;
    Eigen::VectorXd costs;
    double delta = kInf;

    Index size() const { return Index(pairs.size()); }
    bool empty() const { return pairs.empty(); }
};

/// Every adjacent-frame pair with cost <= delta, ordered by (from, to).
PairSet build_pairs(const Lattice& lat, const CostFn& d, double delta);
PairSet build_pairs(const FrameLayout& layout, std::span<const Eigen::MatrixXd> costs, double delta);

} // namespace ptrack
