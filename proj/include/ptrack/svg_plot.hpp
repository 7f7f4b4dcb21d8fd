#pragma once

#include "ptrack/analysis.hpp"
#include "ptrack/eval.hpp"
#include "ptrack/paths.hpp"

#include <string>

namespace ptrack {

/// Frequency range shown on the y axis, in Hz.
struct PlotRange {
    double f_lo = 200.0;
    double f_hi = 2050.0;
};

/// One panel: atoms as short segments of slope psi shaded by power (black is
/// the loudest atom, -60 dB and below is white), tracked paths on top in
/// colour. `paths` may be null for an atoms-only panel.
std::string plot_panel_svg(const Lattice& lat, const PathSet* paths, PlotRange range,
                           const std::string& title);

/// Grid with one row per SNR and columns atoms / LP / greedy, from the first
/// trial at each SNR.
std::string plot_experiment_svg(const ExperimentResult& res, const ExperimentConfig& cfg);

} // namespace ptrack
