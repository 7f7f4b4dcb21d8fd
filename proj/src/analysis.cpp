#include "ptrack/analysis.hpp"

#include "ptrack/errors.hpp"

#include <Eigen/SVD>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace ptrack {

using cplx = std::complex<double>;

void validate(const StftConfig& cfg)
{
    if (cfg.win_len < 4)
        throw InvalidInput("win_len must be at least 4");
    if (cfg.hop < 1 || cfg.hop > cfg.win_len)
        throw InvalidInput("hop must lie in [1, win_len]");
    if (cfg.fft_len < cfg.win_len)
        throw InvalidInput("fft_len must be >= win_len");
    if (!(cfg.fs > 0))
        throw InvalidInput("sample rate must be positive");
}

void validate(const PeakPickConfig& cfg)
{
    if (!(cfg.band_width > 0) || !(cfg.band_spacing > 0))
        throw InvalidInput("band width and spacing must be positive");
    if (cfg.band_spacing > cfg.band_width)
        throw InvalidInput("band spacing must not exceed band width");
    if (!(cfg.f_min >= 0) || !(cfg.f_min < cfg.f_max))
        throw InvalidInput("need 0 <= f_min < f_max");
    if (!(cfg.floor_db <= 0))
        throw InvalidInput("peak floor must be <= 0 dB");
}

FrameLayout::FrameLayout(std::vector<Index> sizes) : sizes_(std::move(sizes))
{
    offsets_.reserve(sizes_.size() + 1);
    for (Index n : sizes_) {
        if (n < 0)
            throw InvalidInput("negative frame size");
        offsets_.push_back(offsets_.back() + n);
    }
}

Index FrameLayout::frame_of(Index m) const
{
    if (m < 0 || m >= node_count())
        throw InvalidInput("node index out of range");
    // first offset strictly greater than m, minus one; empty frames share offsets
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), m);
    return Index(it - offsets_.begin()) - 1;
}

FrameLayout Lattice::layout() const
{
    std::vector<Index> sizes;
    sizes.reserve(frames.size());
    for (const auto& f : frames)
        sizes.push_back(Index(f.size()));
    return FrameLayout(std::move(sizes));
}

const ChirpAtom& Lattice::node(const FrameLayout& layout, Index m) const
{
    const Index k = layout.frame_of(m);
    return frames[std::size_t(k)][std::size_t(m - layout.offset(k))];
}

Index frame_count(Index n_samples, const StftConfig& cfg)
{
    validate(cfg);
    if (n_samples < cfg.win_len)
        throw InvalidInput("signal shorter than one analysis window");
    return (n_samples - cfg.win_len) / cfg.hop + 1;
}

namespace {

Eigen::VectorXcd as_complex(const SignalBuffer& s)
{
    Eigen::VectorXcd x(s.size());
    for (Index n = 0; n < s.size(); ++n)
        x[n] = cplx(s.samples[n], s.is_complex() ? s.imag[n] : 0.0);
    return x;
}

/// Inner products of one frame against the test atom at a single bin, with
/// time measured from the frame centre:
///   s0 = <x, psi>,  s1 = <x, tau psi>,  sd = <x, psi'>.
struct BinMoments {
    cplx s0, s1, sd;
};

/// Precomputed per-window quantities shared by every frame.
struct DdmKernel {
    Eigen::ArrayXd w;
    Eigen::ArrayXd dw;
    Eigen::ArrayXd tau;
    Index fft_len = 0;

    DdmKernel(const CosineSumWindow<double>& window, Index fft)
        : w(window_values(window)), dw(window_derivative(window)), fft_len(fft)
    {
        const Index n = window.length;
        tau = Eigen::ArrayXd::LinSpaced(n, 0.0, double(n - 1)) - 0.5 * double(n);
    }

    double bin_omega(Index bin) const { return 2.0 * std::numbers::pi * double(bin) / double(fft_len); }

    BinMoments direct(const Eigen::Ref<const Eigen::VectorXcd>& x, Index bin) const
    {
        const double om = bin_omega(bin);
        BinMoments m{};
        for (Index n = 0; n < w.size(); ++n) {
            const cplx e = std::polar(1.0, -om * tau[n]);
            const cplx xe = x[n] * e;
            m.s0 += xe * w[n];
            m.s1 += xe * (tau[n] * w[n]);
            m.sd += xe * cplx(dw[n], -om * w[n]);
        }
        return m;
    }
};

/// Solves c1 <x,psi_a> + 2 c2 <x, tau psi_a> = -<x, psi_a'> over the three
/// atoms, then recovers phase from c0.
std::optional<ChirpAtom> solve_ddm(const DdmKernel& kernel, const std::array<BinMoments, 3>& m,
                                   Index peak_bin)
{
    Eigen::MatrixXcd lhs(3, 2);
    Eigen::VectorXcd rhs(3);
    for (int r = 0; r < 3; ++r) {
        lhs(r, 0) = m[r].s0;
        lhs(r, 1) = 2.0 * m[r].s1;
        rhs[r] = -m[r].sd;
    }
    if (!lhs.allFinite() || !rhs.allFinite())
        return std::nullopt;

    // equilibrate columns so the conditioning test is scale-free
    Eigen::Vector2d scale;
    for (int c = 0; c < 2; ++c) {
        scale[c] = lhs.col(c).norm();
        if (!(scale[c] > 0))
            return std::nullopt;
        lhs.col(c) /= scale[c];
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(lhs, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (!(sv[1] > 0) || sv[0] / sv[1] > kDdmMaxCondition)
        return std::nullopt;
    Eigen::VectorXcd sol = svd.solve(rhs);
    const cplx c1 = sol[0] / scale[0];
    const cplx c2 = sol[1] / scale[1];

    const double om_peak = kernel.bin_omega(peak_bin);
    cplx model(0.0, 0.0);
    for (Index n = 0; n < kernel.w.size(); ++n) {
        const double t = kernel.tau[n];
        model += std::exp(c1 * t + c2 * t * t) * kernel.w[n] * std::polar(1.0, -om_peak * t);
    }
    const cplx ratio = m[1].s0 / model;
    if (!std::isfinite(ratio.real()) || !std::isfinite(ratio.imag()) || std::abs(ratio) == 0.0)
        return std::nullopt;

    ChirpAtom atom;
    atom.omega = c1.imag();
    atom.psi = 2.0 * c2.imag();
    atom.phi = std::arg(ratio);
    atom.bin = peak_bin;
    if (!(atom.omega > 0.0 && atom.omega < std::numbers::pi) || !std::isfinite(atom.psi))
        return std::nullopt;
    return atom;
}

bool bins_in_range(Index peak_bin, Index fft_len)
{
    return peak_bin >= 1 && peak_bin + 1 <= fft_len / 2;
}

} // namespace

Spectrogram stft(const SignalBuffer& signal, const StftConfig& cfg, const CosineSumWindow<double>& w)
{
    const Index frames = frame_count(signal.size(), cfg);
    if (w.length != cfg.win_len)
        throw InvalidInput("window length must equal win_len");
    const Eigen::ArrayXd wv = window_values(w);
    const Eigen::VectorXcd x = as_complex(signal);
    const Index half = cfg.fft_len / 2 + 1;

    Spectrogram out;
    out.cfg = cfg;
    out.bins.resize(frames, half);
    Eigen::FFT<double> fft;
    std::vector<cplx> in(std::size_t(cfg.fft_len)), spec;
    for (Index k = 0; k < frames; ++k) {
        std::fill(in.begin(), in.end(), cplx(0.0));
        for (Index n = 0; n < cfg.win_len; ++n)
            in[std::size_t(n)] = x[k * cfg.hop + n] * wv[n];
        fft.fwd(spec, in);
        for (Index b = 0; b < half; ++b)
            out.bins(k, b) = spec[std::size_t(b)];
    }
    return out;
}

std::vector<Index> pick_peaks(const Eigen::Ref<const Eigen::ArrayXd>& magnitude,
                              const PeakPickConfig& cfg, double fs, Index fft_len)
{
    validate(cfg);
    const double bin_hz = fs / double(fft_len);
    const Index last = magnitude.size() - 1;
    const double floor = last >= 0 ? magnitude.maxCoeff() * std::pow(10.0, cfg.floor_db / 20.0) : 0.0;
    std::vector<Index> peaks;
    for (Index band = 0;; ++band) {
        const double lo = cfg.f_min + double(band) * cfg.band_spacing;
        if (lo >= cfg.f_max)
            break;
        const double hi = std::min(lo + cfg.band_width, cfg.f_max);
        const bool closed = hi >= cfg.f_max;
        const auto first = Index(std::ceil(lo / bin_hz));
        Index best = -1;
        for (Index b = std::max<Index>(first, 0); b <= last; ++b) {
            const double f = double(b) * bin_hz;
            if (f > hi || (!closed && f >= hi))
                break;
            if (best < 0 || magnitude[b] > magnitude[best])
                best = b;
        }
        if (best > 0 && best < last && magnitude[best] > floor && magnitude[best] > magnitude[best - 1] &&
            magnitude[best] > magnitude[best + 1])
            peaks.push_back(best);
    }
    std::sort(peaks.begin(), peaks.end());
    peaks.erase(std::unique(peaks.begin(), peaks.end()), peaks.end());
    return peaks;
}

std::optional<ChirpAtom> ddm_estimate(const Eigen::Ref<const Eigen::VectorXd>& segment, Index peak_bin,
                                      const StftConfig& cfg, const CosineSumWindow<double>& w)
{
    validate(cfg);
    if (segment.size() != cfg.win_len || w.length != cfg.win_len)
        throw InvalidInput("segment and window must both span win_len samples");
    if (!bins_in_range(peak_bin, cfg.fft_len))
        throw InvalidInput("peak bin and both neighbours must be inside 0..fft_len/2");
    const DdmKernel kernel(w, cfg.fft_len);
    const Eigen::VectorXcd x = segment.cast<cplx>();
    const std::array<BinMoments, 3> m{kernel.direct(x, peak_bin - 1), kernel.direct(x, peak_bin),
                                      kernel.direct(x, peak_bin + 1)};
    auto atom = solve_ddm(kernel, m, peak_bin);
    if (atom)
        atom->power = std::norm(m[1].s0);
    return atom;
}

Lattice analyze(const SignalBuffer& signal, const AnalysisConfig& cfg)
{
    validate(cfg.stft);
    validate(cfg.peaks);
    const StftConfig& sc = cfg.stft;
    if (cfg.window.length != sc.win_len)
        throw InvalidInput("window length must equal win_len");
    const Index frames = frame_count(signal.size(), sc);
    const DdmKernel kernel(cfg.window, sc.fft_len);
    const Eigen::VectorXcd x = as_complex(signal);
    const double om_lo = 2.0 * std::numbers::pi * cfg.peaks.f_min / sc.fs;
    const double om_hi = 2.0 * std::numbers::pi * cfg.peaks.f_max / sc.fs;
    const Index half = sc.fft_len / 2 + 1;

    Lattice lat;
    lat.fs = sc.fs;
    lat.hop = sc.hop;
    lat.win_len = sc.win_len;
    lat.frames.resize(std::size_t(frames));

    // Moments for every bin come from three zero-padded FFTs per frame:
    // x w, x tau w and x w'. The centred time origin adds a phase of
    // exp(j omega_b win_len / 2) to each uncentred bin.
    Eigen::FFT<double> fft;
    std::vector<cplx> in_w(std::size_t(sc.fft_len)), in_tw(in_w.size()), in_dw(in_w.size());
    std::vector<cplx> f_w, f_tw, f_dw;
    Eigen::ArrayXd mag(half);
    for (Index k = 0; k < frames; ++k) {
        std::fill(in_w.begin(), in_w.end(), cplx(0.0));
        std::fill(in_tw.begin(), in_tw.end(), cplx(0.0));
        std::fill(in_dw.begin(), in_dw.end(), cplx(0.0));
        for (Index n = 0; n < sc.win_len; ++n) {
            const cplx v = x[k * sc.hop + n];
            in_w[std::size_t(n)] = v * kernel.w[n];
            in_tw[std::size_t(n)] = v * (kernel.tau[n] * kernel.w[n]);
            in_dw[std::size_t(n)] = v * kernel.dw[n];
        }
        fft.fwd(f_w, in_w);
        fft.fwd(f_tw, in_tw);
        fft.fwd(f_dw, in_dw);
        for (Index b = 0; b < half; ++b)
            mag[b] = std::abs(f_w[std::size_t(b)]);

        auto moments = [&](Index b) {
            const double om = kernel.bin_omega(b);
            const cplx rot = std::polar(1.0, om * 0.5 * double(sc.win_len));
            BinMoments m;
            m.s0 = f_w[std::size_t(b)] * rot;
            m.s1 = f_tw[std::size_t(b)] * rot;
            m.sd = f_dw[std::size_t(b)] * rot - cplx(0.0, om) * m.s0;
            return m;
        };

        for (Index b : pick_peaks(mag, cfg.peaks, sc.fs, sc.fft_len)) {
            if (!bins_in_range(b, sc.fft_len))
                continue;
            auto atom = solve_ddm(kernel, {moments(b - 1), moments(b), moments(b + 1)}, b);
            if (!atom || atom->omega < om_lo || atom->omega > om_hi)
                continue;
            atom->frame = k;
            atom->power = mag[b] * mag[b];
            lat.frames[std::size_t(k)].push_back(*atom);
        }
    }
    return lat;
}

} // namespace ptrack
