#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ptrack/errors.hpp"
#include "ptrack/window.hpp"

#include <cmath>

using namespace ptrack;

TEST_CASE("nuttall window vanishes at the ends and peaks at one in the middle")
{
    const auto w = nuttall_window(2048);
    CHECK(std::abs(w.value(0.0)) < 1e-12);
    CHECK(std::abs(w.value(2048.0)) < 1e-12);
    CHECK(w.value(1024.0) == doctest::Approx(1.0).epsilon(1e-12));
    const auto v = window_values(w);
    CHECK(v.maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(v.minCoeff() >= -1e-12);
}

TEST_CASE("window sum over a full period is N a0")
{
    // Each cosine term sums to zero over its period, leaving the constant.
    for (Eigen::Index n : {64, 512, 2048}) {
        const auto v = window_values(nuttall_window(n));
        CHECK(v.sum() == doctest::Approx(double(n) * kNuttallC1Coeffs[0]).epsilon(1e-12));
    }
}

TEST_CASE("window energy matches the closed form")
{
    const Eigen::Index n = 1024;
    const auto v = window_values(nuttall_window(n));
    const auto& a = kNuttallC1Coeffs;
    const double expected = double(n) * (a[0] * a[0] + 0.5 * (a[1] * a[1] + a[2] * a[2] + a[3] * a[3]));
    CHECK(v.square().sum() == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("analytic derivative agrees with central differences at second order")
{
    const auto w = nuttall_window(256);
    for (double t : {10.3, 64.0, 100.7, 200.1}) {
        const double h1 = 0.5, h2 = 0.25;
        const double e1 = std::abs((w.value(t + h1) - w.value(t - h1)) / (2 * h1) - w.derivative(t));
        const double e2 = std::abs((w.value(t + h2) - w.value(t - h2)) / (2 * h2) - w.derivative(t));
        CHECK(e1 < 1e-5);
        CHECK(e2 / e1 == doctest::Approx(0.25).epsilon(0.02));
    }
}

TEST_CASE("window is symmetric and its derivative antisymmetric about the centre")
{
    const auto w = nuttall_window(300);
    for (double t = 0.0; t <= 150.0; t += 7.5) {
        CHECK(w.value(t) == doctest::Approx(w.value(300.0 - t)).epsilon(1e-12));
        CHECK(w.derivative(t) == doctest::Approx(-w.derivative(300.0 - t)).epsilon(1e-10));
    }
    CHECK(std::abs(w.derivative(0.0)) < 1e-14);
    CHECK(std::abs(w.derivative(150.0)) < 1e-14);
}

TEST_CASE("sampled derivative array matches derivative()")
{
    const auto w = nuttall_window(32);
    const auto d = window_derivative(w);
    for (Eigen::Index n = 0; n < 32; ++n)
        CHECK(d[n] == doctest::Approx(w.derivative(double(n))));
}

TEST_CASE("window validation")
{
    CHECK_NOTHROW(validate(nuttall_window(2048)));
    CHECK_THROWS_AS(validate(nuttall_window(2)), InvalidInput);

    CosineSumWindow<double> hann{{0.5, 0.5, 0.0, 0.0}, 64};
    CHECK_NOTHROW(validate(hann));

    CosineSumWindow<double> bad_sum{{0.4, 0.4, 0.0, 0.0}, 64};
    CHECK_THROWS_AS(validate(bad_sum), InvalidInput);

    CosineSumWindow<double> bad_end{{0.6, 0.3, 0.1, 0.0}, 64};
    CHECK_THROWS_AS(validate(bad_end), InvalidInput);
}

TEST_CASE("single precision window")
{
    const auto w = nuttall_window<float>(128);
    CHECK(w.value(64.0f) == doctest::Approx(1.0f).epsilon(1e-6));
    CHECK(std::abs(w.value(0.0f)) < 1e-6f);
}
