#include "ftecdi/downstream.hpp"
#include "ftecdi/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace ftecdi;

namespace {

std::vector<double> grid(double t_end, double dt)
{
    std::vector<double> t;
    for (int k = 0; k * dt <= t_end + 1e-9; ++k) t.push_back(k * dt);
    return t;
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& y)
{
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) s += 0.5 * (t[i + 1] - t[i]) * (y[i] + y[i + 1]);
    return s;
}

} // namespace

TEST_CASE("mixing tank")
{
    SUBCASE("constant input at rest stays put")
    {
        const auto t = grid(300.0, 3.7);
        const std::vector<double> u(t.size(), 4.2);
        for (double y : downstream::mixing_tank(t, u, 60.0, 4.2)) CHECK(y == doctest::Approx(4.2).epsilon(1e-15));
    }
    SUBCASE("step response")
    {
        for (double dt : {0.1, 7.5, 60.0}) {
            const auto t = grid(120.0, dt);
            const std::vector<double> u(t.size(), 1.0);
            const auto y = downstream::mixing_tank(t, u, 60.0, 0.0);
            const auto at60 = std::find_if(t.begin(), t.end(), [](double x) { return std::abs(x - 60.0) < 1e-9; });
            REQUIRE(at60 != t.end());
            CHECK(std::abs(y[at60 - t.begin()] - (1.0 - std::exp(-1.0))) < 1e-6);
        }
    }
    SUBCASE("ramp input lags by the residence time")
    {
        const double tau = 60.0, slope = 0.01;
        const auto t = grid(1200.0, 13.0);
        std::vector<double> u;
        for (double x : t) u.push_back(slope * x);
        const auto y = downstream::mixing_tank(t, u, tau, 0.0);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double exact = slope * (t[i] - tau + tau * std::exp(-t[i] / tau));
            CHECK(y[i] == doctest::Approx(exact).epsilon(1e-12).scale(1e-12));
        }
        CHECK(u.back() - y.back() == doctest::Approx(slope * tau).epsilon(1e-6));
    }
    SUBCASE("zero residence time is the identity")
    {
        const std::vector<double> t{0.0, 1.0, 2.5}, u{1.0, 3.0, 2.0};
        CHECK(downstream::mixing_tank(t, u, 0.0, 7.0) == u);
    }
    SUBCASE("a pulse keeps its integral")
    {
        const auto t = grid(2000.0, 0.05);
        std::vector<double> u;
        for (double x : t) u.push_back(x >= 100.0 && x <= 250.0 ? 2.0 : 0.0);
        const auto y = downstream::mixing_tank(t, u, 60.0, 0.0);
        const double in = trapezoid(t, u);
        const double out = trapezoid(t, y) + 60.0 * (y.back() - y.front()); // final-value adjustment
        CHECK(std::abs(in - out) < 1e-6 * in);
    }
    SUBCASE("output stays inside the input range")
    {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> u(2.0, 8.0), h(0.1, 20.0);
        std::vector<double> t{0.0}, x{u(rng)};
        for (int k = 0; k < 400; ++k) {
            t.push_back(t.back() + h(rng));
            x.push_back(u(rng));
        }
        const auto lo = *std::min_element(x.begin(), x.end());
        const auto hi = *std::max_element(x.begin(), x.end());
        for (double y : downstream::mixing_tank(t, x, 60.0, x.front())) {
            CHECK(y >= lo - 1e-12);
            CHECK(y <= hi + 1e-12);
        }
    }
    SUBCASE("bad time base")
    {
        const std::vector<double> t{0.0, 2.0, 2.0}, u{1.0, 1.0, 1.0};
        CHECK_THROWS_AS(downstream::mixing_tank(t, u, 60.0, 0.0), ConfigError);
        const std::vector<double> short_u{1.0};
        CHECK_THROWS_AS(downstream::mixing_tank(t, short_u, 60.0, 0.0), ConfigError);
    }
}

TEST_CASE("plug delay")
{
    const auto t = grid(60.0, 0.5);
    std::vector<double> u;
    for (double x : t) u.push_back(x >= 10.0 ? 1.0 : 0.0);

    SUBCASE("zero delay is the identity")
    {
        CHECK(downstream::plug_delay(t, u, 0.0, 0.0) == u);
    }
    SUBCASE("a step moves by exactly the delay")
    {
        const auto y = downstream::plug_delay(t, u, 15.0, 0.0);
        for (std::size_t i = 0; i < t.size(); ++i) {
            CHECK(y[i] == (t[i] >= 25.0 ? 1.0 : 0.0));
        }
        const std::vector<double> step_at_zero(t.size(), 1.0);
        const auto z = downstream::plug_delay(t, step_at_zero, 15.0, 0.0);
        for (std::size_t i = 0; i < t.size(); ++i) CHECK(z[i] == (t[i] >= 15.0 ? 1.0 : 0.0));
    }
    SUBCASE("delays add")
    {
        std::vector<double> smooth;
        for (double x : t) smooth.push_back(std::sin(0.1 * x) + 0.02 * x);
        const auto once = downstream::plug_delay(t, smooth, 15.0, 0.0);
        const auto twice =
            downstream::plug_delay(t, downstream::plug_delay(t, smooth, 5.0, 0.0), 10.0, 0.0);
        for (std::size_t i = 0; i < t.size(); ++i) CHECK(twice[i] == doctest::Approx(once[i]).epsilon(1e-14).scale(1e-14));
    }
}

TEST_CASE("sensed trace is tank then delay")
{
    const auto t = grid(400.0, 1.0);
    std::vector<double> u;
    for (double x : t) u.push_back(5.0 - 2.0 * std::exp(-x / 50.0) * (1.0 - std::exp(-x / 5.0)));
    const DownstreamParams d;
    const auto s = downstream::sensed(t, u, d, 5.0);
    const auto manual = downstream::plug_delay(t, downstream::mixing_tank(t, u, 60.0, 5.0), 15.0, 5.0);
    CHECK(s == manual);
    double peak_in = 0.0, peak_out = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        peak_in = std::max(peak_in, std::abs(u[i] - 5.0));
        peak_out = std::max(peak_out, std::abs(s[i] - 5.0));
    }
    CHECK(peak_out < peak_in);
}
