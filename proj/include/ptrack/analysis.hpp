#pragma once

#include "ptrack/signal.hpp"
#include "ptrack/window.hpp"

#include <Eigen/Core>

#include <complex>
#include <optional>
#include <vector>

namespace ptrack {

using Index = Eigen::Index;

struct StftConfig {
    Index win_len = 2048;
    Index hop = 512;
    Index fft_len = 2048;
    double fs = 16000.0;
};

void validate(const StftConfig& cfg);

struct PeakPickConfig {
    double band_width = 100.0;  // Hz
    double band_spacing = 50.0; // Hz
    double f_min = 250.0;       // Hz
    double f_max = 2000.0;      // Hz
    /// Peaks more than this many dB below the loudest bin of the frame are
    /// dropped, which keeps window sidelobes out of the lattice.
    double floor_db = -80.0;
};

void validate(const PeakPickConfig& cfg);

/// One lattice node: chirp parameters at the centre of frame `frame`.
struct ChirpAtom {
    Index frame = 0;
    double phi = 0.0;   // radians
    double omega = 0.0; // rad/sample
    double psi = 0.0;   // rad/sample^2
    double power = 0.0; // |X(bin)|^2
    Index bin = 0;

    friend bool operator==(const ChirpAtom&, const ChirpAtom&) = default;
};

/// Node counts per frame and the frame-major global index built on them.
class FrameLayout {
public:
    FrameLayout() = default;
    explicit FrameLayout(std::vector<Index> sizes);

    Index frame_count() const { return Index(sizes_.size()); }
    Index node_count() const { return offsets_.back(); }
    Index size(Index k) const { return sizes_[std::size_t(k)]; }
    Index offset(Index k) const { return offsets_[std::size_t(k)]; }
    Index index_of(Index k, Index i) const { return offsets_[std::size_t(k)] + i; }
    Index frame_of(Index m) const;
    Index local_of(Index m) const { return m - offset(frame_of(m)); }
    const std::vector<Index>& sizes() const { return sizes_; }

private:
    std::vector<Index> sizes_;
    std::vector<Index> offsets_{0};
};

/// Frames of chirp atoms in time order, plus the analysis metadata needed to
/// interpret them (hop for prediction costs, fs and win_len for Hz/seconds).
struct Lattice {
    std::vector<std::vector<ChirpAtom>> frames;
    double fs = 0.0;
    Index hop = 0;
    Index win_len = 0;

    Index frame_count() const { return Index(frames.size()); }
    FrameLayout layout() const;
    Index node_count() const { return layout().node_count(); }
    /// Node m in frame-major order.
    const ChirpAtom& node(const FrameLayout& layout, Index m) const;
    /// Sample index of the centre of frame k.
    double frame_center(Index k) const { return double(k * hop) + 0.5 * double(win_len); }
};

/// Rows are frames, columns bins 0..fft_len/2.
struct Spectrogram {
    Eigen::MatrixXcd bins;
    StftConfig cfg;

    Index frame_count() const { return bins.rows(); }
};

Index frame_count(Index n_samples, const StftConfig& cfg);

Spectrogram stft(const SignalBuffer& signal, const StftConfig& cfg,
                 const CosineSumWindow<double>& w);

/// Band-wise local maxima, ascending and deduplicated. In each band the
/// highest bin is emitted if it is also a strict local maximum of the whole
/// row and lies above the relative floor.
std::vector<Index> pick_peaks(const Eigen::Ref<const Eigen::ArrayXd>& magnitude,
                              const PeakPickConfig& cfg, double fs, Index fft_len);

/// Distribution Derivative Method estimate at `peak_bin` from the raw
/// (unwindowed) frame samples. Time is measured from the frame centre so the
/// returned phase and frequency refer to it. Returns nullopt when the 3x2
/// system is ill-conditioned or the result is not a valid frequency.
std::optional<ChirpAtom> ddm_estimate(const Eigen::Ref<const Eigen::VectorXd>& segment,
                                      Index peak_bin, const StftConfig& cfg,
                                      const CosineSumWindow<double>& w);

inline constexpr double kDdmMaxCondition = 1e8;

struct AnalysisConfig {
    StftConfig stft;
    PeakPickConfig peaks;
    CosineSumWindow<double> window = nuttall_window(2048);
};

Lattice analyze(const SignalBuffer& signal, const AnalysisConfig& cfg);

} // namespace ptrack
