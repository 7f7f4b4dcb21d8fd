#pragma once

#include "ptrack/errors.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <numbers>

namespace ptrack {

/// 4-term Nuttall window with continuous first derivative.
inline constexpr std::array<double, 4> kNuttallC1Coeffs{0.355768, 0.487396, 0.144232, 0.012604};

namespace detail {
constexpr double cabs(double v) { return v < 0 ? -v : v; }
} // namespace detail

static_assert(detail::cabs(kNuttallC1Coeffs[0] + kNuttallC1Coeffs[1] + kNuttallC1Coeffs[2] +
                           kNuttallC1Coeffs[3] - 1.0) < 1e-12,
              "window coefficients must sum to one");
static_assert(detail::cabs(kNuttallC1Coeffs[0] - kNuttallC1Coeffs[1] + kNuttallC1Coeffs[2] -
                           kNuttallC1Coeffs[3]) < 1e-12,
              "window must vanish at its endpoints");

/// Periodic cosine-sum window
///
///     w(t) = sum_k (-1)^k a_k cos(2 pi k t / N),   t in [0, N)
///
/// which is zero at t = 0 and peaks at t = N / 2. `value` and `derivative`
/// evaluate the continuous form so the window can be sampled at any rate;
/// the derivative is in units of 1/sample.
template <typename Scalar>
struct CosineSumWindow {
    std::array<Scalar, 4> coeffs{};
    Eigen::Index length = 0;

    Scalar value(Scalar t) const
    {
        const Scalar step = Scalar(2) * std::numbers::pi_v<Scalar> / Scalar(length);
        Scalar sum(0);
        for (int k = 0; k < 4; ++k) {
            const Scalar sign = (k % 2 == 0) ? Scalar(1) : Scalar(-1);
            sum += sign * coeffs[k] * std::cos(step * Scalar(k) * t);
        }
        return sum;
    }

    Scalar derivative(Scalar t) const
    {
        const Scalar step = Scalar(2) * std::numbers::pi_v<Scalar> / Scalar(length);
        Scalar sum(0);
        for (int k = 1; k < 4; ++k) {
            const Scalar sign = (k % 2 == 0) ? Scalar(1) : Scalar(-1);
            sum -= sign * coeffs[k] * step * Scalar(k) * std::sin(step * Scalar(k) * t);
        }
        return sum;
    }

    Scalar coefficient_sum() const { return coeffs[0] + coeffs[1] + coeffs[2] + coeffs[3]; }

    Scalar endpoint_value() const { return coeffs[0] - coeffs[1] + coeffs[2] - coeffs[3]; }
};

template <typename Scalar = double>
CosineSumWindow<Scalar> nuttall_window(Eigen::Index length)
{
    CosineSumWindow<Scalar> w;
    for (int k = 0; k < 4; ++k)
        w.coeffs[k] = Scalar(kNuttallC1Coeffs[k]);
    w.length = length;
    return w;
}

/// Throws InvalidInput unless the window is long enough, peak-normalized
/// and vanishes at both ends.
template <typename Scalar>
void validate(const CosineSumWindow<Scalar>& w, Scalar tol = Scalar(1e-9))
{
    if (w.length < 4)
        throw InvalidInput("window length must be at least 4");
    if (std::abs(w.coefficient_sum() - Scalar(1)) > tol)
        throw InvalidInput("window coefficients must sum to 1");
    if (std::abs(w.endpoint_value()) > tol)
        throw InvalidInput("window coefficients must satisfy a0 - a1 + a2 - a3 = 0");
}

template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> window_values(const CosineSumWindow<Scalar>& w)
{
    validate(w, Scalar(1e-6));
    Eigen::Array<Scalar, Eigen::Dynamic, 1> out(w.length);
    for (Eigen::Index n = 0; n < w.length; ++n)
        out[n] = w.value(Scalar(n));
    return out;
}

template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> window_derivative(const CosineSumWindow<Scalar>& w)
{
    validate(w, Scalar(1e-6));
    Eigen::Array<Scalar, Eigen::Dynamic, 1> out(w.length);
    for (Eigen::Index n = 0; n < w.length; ++n)
        out[n] = w.derivative(Scalar(n));
    return out;
}

} // namespace ptrack
