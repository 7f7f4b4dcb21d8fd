#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <span>

namespace ptrack {

/// Linear chirp exp(j(phi + omega n + psi n^2 / 2)), n in samples.
struct ChirpSpec {
    double phi = 0.0;   // radians
    double omega = 0.0; // rad/sample
    double psi = 0.0;   // rad/sample^2

    /// Chirp ramping linearly from f0_hz to f1_hz over n_samples.
    static ChirpSpec from_frequencies(double f0_hz, double f1_hz, double fs, Eigen::Index n_samples,
                                      double phi = 0.0);

    double nu0(double fs) const;
    double nu1(double fs, Eigen::Index n_samples) const;
    double omega_at(double n) const { return omega + psi * n; }
};

/// Throws InvalidInput if the instantaneous frequency leaves [0, pi) within n_samples.
void validate(const ChirpSpec& spec, Eigen::Index n_samples);

/// Mono buffer. `imag` is empty for real signals and carries the quadrature
/// channel for complex ones.
struct SignalBuffer {
    Eigen::VectorXd samples;
    Eigen::VectorXd imag;
    double fs = 0.0;

    Eigen::Index size() const { return samples.size(); }
    bool is_complex() const { return imag.size() != 0; }
    /// Mean squared magnitude per sample.
    double power() const;
};

enum class Synthesis { real_part, complex };

SignalBuffer synth_chirp(const ChirpSpec& spec, Eigen::Index n_samples, double fs,
                         Synthesis mode = Synthesis::real_part);

SignalBuffer mix(std::span<const SignalBuffer> signals);

/// Passing this as `snr_db` returns the input unchanged.
inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

/// Adds white Gaussian noise of variance P_sig * 10^(-snr_db / 10), with
/// P_sig measured on the input. Noise is drawn from std::mt19937_64 seeded
/// with `seed` through std::normal_distribution; complex buffers split the
/// variance evenly between channels.
SignalBuffer add_noise(const SignalBuffer& signal, double snr_db, std::uint64_t seed);

/// 10 log10(P_clean / P_noise) with the noise taken as noisy - clean.
double measured_snr_db(const SignalBuffer& clean, const SignalBuffer& noisy);

} // namespace ptrack
