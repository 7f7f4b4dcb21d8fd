#include "ptrack/signal.hpp"

#include "ptrack/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace ptrack {

ChirpSpec ChirpSpec::from_frequencies(double f0_hz, double f1_hz, double fs, Eigen::Index n_samples,
                                      double phi)
{
    if (fs <= 0 || n_samples <= 0)
        throw InvalidInput("chirp needs a positive sample rate and length");
    const double scale = 2.0 * std::numbers::pi / fs;
    ChirpSpec spec;
    spec.phi = phi;
    spec.omega = f0_hz * scale;
    spec.psi = (f1_hz - f0_hz) * scale / double(n_samples);
    return spec;
}

double ChirpSpec::nu0(double fs) const { return omega * fs / (2.0 * std::numbers::pi); }

double ChirpSpec::nu1(double fs, Eigen::Index n_samples) const
{
    return (omega + psi * double(n_samples)) * fs / (2.0 * std::numbers::pi);
}

void validate(const ChirpSpec& spec, Eigen::Index n_samples)
{
    if (n_samples <= 0)
        throw InvalidInput("chirp length must be positive");
    const double last = spec.omega_at(double(n_samples - 1));
    for (double w : {spec.omega, last}) {
        if (!(w >= 0.0 && w < std::numbers::pi))
            throw InvalidInput("chirp frequency " + std::to_string(w) +
                               " rad/sample leaves [0, pi) during the sweep");
    }
}

double SignalBuffer::power() const
{
    if (samples.size() == 0)
        return 0.0;
    double energy = samples.squaredNorm();
    if (is_complex())
        energy += imag.squaredNorm();
    return energy / double(samples.size());
}

SignalBuffer synth_chirp(const ChirpSpec& spec, Eigen::Index n_samples, double fs, Synthesis mode)
{
    validate(spec, n_samples);
    SignalBuffer out;
    out.fs = fs;
    out.samples.resize(n_samples);
    if (mode == Synthesis::complex)
        out.imag.resize(n_samples);
    for (Eigen::Index n = 0; n < n_samples; ++n) {
        const double t = double(n);
        const double phase = spec.phi + spec.omega * t + 0.5 * spec.psi * t * t;
        out.samples[n] = std::cos(phase);
        if (mode == Synthesis::complex)
            out.imag[n] = std::sin(phase);
    }
    return out;
}

SignalBuffer mix(std::span<const SignalBuffer> signals)
{
    if (signals.empty())
        throw InvalidInput("mix needs at least one signal");
    SignalBuffer out = signals.front();
    for (const SignalBuffer& s : signals.subspan(1)) {
        if (s.size() != out.size() || s.fs != out.fs)
            throw InvalidInput("mix: length or sample-rate mismatch");
        if (s.is_complex() != out.is_complex())
            throw InvalidInput("mix: cannot combine real and complex buffers");
        out.samples += s.samples;
        if (out.is_complex())
            out.imag += s.imag;
    }
    return out;
}

SignalBuffer add_noise(const SignalBuffer& signal, double snr_db, std::uint64_t seed)
{
    if (std::isinf(snr_db) && snr_db > 0)
        return signal;
    if (std::isnan(snr_db))
        throw InvalidInput("SNR must be a number");
    const double p_sig = signal.power();
    if (!(p_sig > 0.0))
        throw InvalidInput("cannot set an SNR on an all-zero signal");

    const double variance = p_sig * std::pow(10.0, -snr_db / 10.0);
    const int channels = signal.is_complex() ? 2 : 1;
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(variance / channels));

    SignalBuffer out = signal;
    for (Eigen::Index n = 0; n < out.size(); ++n)
        out.samples[n] += normal(gen);
    if (out.is_complex())
        for (Eigen::Index n = 0; n < out.size(); ++n)
            out.imag[n] += normal(gen);
    return out;
}

double measured_snr_db(const SignalBuffer& clean, const SignalBuffer& noisy)
{
    if (clean.size() != noisy.size())
        throw InvalidInput("measured_snr_db: length mismatch");
    SignalBuffer noise = noisy;
    noise.samples -= clean.samples;
    if (noise.is_complex() && clean.is_complex())
        noise.imag -= clean.imag;
    const double pn = noise.power();
    if (pn == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(clean.power() / pn);
}

} // namespace ptrack
