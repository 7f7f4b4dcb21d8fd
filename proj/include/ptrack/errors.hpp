#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace ptrack {

/// Input that violates a documented precondition or file format.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The lattice cannot carry the requested number of disjoint paths.
///
/// `transition()` names the first frame transition k -> k+1 whose admissible
/// pairs admit fewer than L disjoint connections, or -1 when every transition
/// does individually and the bottleneck only shows up end to end.
/// `frame()` is set instead when a frame holds fewer than L nodes.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& what, Eigen::Index frame, Eigen::Index transition,
                    Eigen::Index max_flow)
        : std::runtime_error(what), frame_(frame), transition_(transition), max_flow_(max_flow)
    {
    }

    Eigen::Index frame() const { return frame_; }
    Eigen::Index transition() const { return transition_; }
    Eigen::Index max_flow() const { return max_flow_; }

private:
    Eigen::Index frame_;
    Eigen::Index transition_;
    Eigen::Index max_flow_;
};

/// A solver produced output that breaks its own constraints.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace ptrack
