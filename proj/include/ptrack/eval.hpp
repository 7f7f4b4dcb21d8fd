#pragma once

#include "ptrack/analysis.hpp"
#include "ptrack/greedy.hpp"
#include "ptrack/lpsolve.hpp"
#include "ptrack/paths.hpp"
#include "ptrack/signal.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace ptrack {

/// Linear chirp given by its start and end frequency over the signal.
struct ChirpTrack {
    double f0_hz = 0.0;
    double f1_hz = 0.0;
    double phi = 0.0;
};

struct SignalConfig {
    // Three chirps inside 250-2000 Hz; the first two cross at 800 Hz half way
    // through, the third stays clear of both. This is a chosen test signal,
    // not a measured reference.
    std::vector<ChirpTrack> chirps{{400.0, 1200.0, 0.0}, {1200.0, 400.0, 0.0}, {1400.0, 1900.0, 0.0}};
    double fs = 16000.0;
    double duration = 1.0; // seconds
    double snr_db = kNoNoise;
    std::uint64_t seed = 1;
    bool complex = false;

    Index n_samples() const;
    std::vector<ChirpSpec> specs() const;
};

SignalBuffer synth_mixture(const SignalConfig& cfg);

struct TrackingConfig {
    double delta_mq = 0.1;
    double delta_lp = 0.1;
    Index paths = 3; // L
    Index k_mq = 3;
};

struct EvalConfig {
    /// kNoNoise entries run the clean signal.
    std::vector<double> snr_list{0.0, -6.0, -12.0};
    Index trials = 5;
    double tolerance_hz = 20.0;
    std::uint64_t seed = 7;
    /// Record per-stage wall time. Off makes the metrics JSON reproducible bit for bit.
    bool timing = true;
};

struct ExperimentConfig {
    SignalConfig signal;
    std::array<double, 4> window_coeffs = kNuttallC1Coeffs;
    StftConfig stft;
    PeakPickConfig peaks;
    TrackingConfig tracking;
    EvalConfig eval;

    AnalysisConfig analysis() const;
};

/// Throws InvalidInput on any out-of-range field, including chirp tracks
/// that leave [f_min, f_max].
void validate(const ExperimentConfig& cfg);

struct ChirpMetrics {
    double coverage = 0.0;
    double mean_error_hz = std::numeric_limits<double>::quiet_NaN();
    double max_error_hz = std::numeric_limits<double>::quiet_NaN();
    Index paths = 0;
};

struct StageTimes {
    double synth = 0.0;
    double analysis = 0.0;
    double tracking = 0.0;
};

struct TrajectoryMetrics {
    std::vector<ChirpMetrics> chirps;
    /// Chirp index each path was assigned to.
    std::vector<Index> assignment;
    double mean_error_hz = std::numeric_limits<double>::quiet_NaN();
    double max_error_hz = std::numeric_limits<double>::quiet_NaN();
    Index path_count = 0;
    Index full_span_paths = 0;
    bool feasible = true;
    bool early_stop = false;
    std::string note;
    StageTimes timing;
};

/// True instantaneous frequency (Hz) of `spec` at the centre of frame k.
double truth_hz(const ChirpSpec& spec, const Lattice& lat, Index k);

/// Assigns each path to the chirp with the smallest mean frequency distance
/// and scores coverage (frames with an assigned node within tolerance) and
/// frequency error per chirp.
TrajectoryMetrics score_paths(const PathSet& ps, const Lattice& lat, std::span<const ChirpSpec> truth,
                              double tolerance_hz);

struct TrialResult {
    double snr_db = 0.0;
    Index trial = 0;
    std::uint64_t seed = 0;
    double achieved_snr_db = 0.0;
    Lattice lattice;
    PathSet lp;
    PathSet greedy;
    TrajectoryMetrics lp_metrics;
    TrajectoryMetrics greedy_metrics;
};

struct MethodSummary {
    std::vector<double> coverage;      // per chirp, median over trials
    std::vector<double> chirp_error_hz; // per chirp, median over trials
    double mean_error_hz = 0.0;        // median of the per-trial overall error
    Index full_span_trials = 0;        // trials returning L paths across all frames
    Index feasible_trials = 0;
};

struct SnrSummary {
    double snr_db = 0.0;
    MethodSummary lp;
    MethodSummary greedy;
};

struct ExperimentResult {
    std::vector<TrialResult> trials;
    std::vector<SnrSummary> summary;
};

std::uint64_t trial_seed(const EvalConfig& cfg, Index snr_index, Index trial);

/// Synthesise, add noise, analyse and track with both methods for every
/// (SNR, trial). An infeasible LP is recorded in its metrics.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Median that treats NaN as +inf.
double median(std::vector<double> values);

struct ScalingRow {
    Index nodes = 0;  // N per frame
    Index frames = 0; // K
    Index step = 0;   // l
    std::uint64_t greedy_candidates = 0;
    std::uint64_t expected_candidates = 0; // (N - l)^K
    Index pairs = 0;                       // P
    double lp_seconds = 0.0;
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    bool counts_match = true;
    /// Least-squares slope of log(LP time) against log(P).
    double lp_loglog_slope = 0.0;
};

/// Random complete lattices: exact greedy candidate counts per step and LP
/// wall time (L = 2, or 1 when N = 1) per (N, K).
ScalingReport scaling_benchmark(std::span<const Index> n_range, std::span<const Index> k_range,
                                std::span<const Index> l_range, Index trials, std::uint64_t seed = 1);

/// Random adjacent-frame costs for a complete lattice with the given sizes;
/// values are multiples of 2^-20 in [0, 1] so sums are exact.
TransitionCosts random_transition_costs(const FrameLayout& layout, std::uint64_t seed);

} // namespace ptrack
