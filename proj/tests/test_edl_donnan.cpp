#include "ftecdi/edl_donnan.hpp"
#include "ftecdi/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace ftecdi;

namespace {

EDLParams table_params() { return {}; }

EDLParams no_attraction(double cs = std::numeric_limits<double>::infinity())
{
    EDLParams p;
    p.attraction_energy = 0.0;
    p.stern_capacitance = cs;
    return p;
}

void check_invariants(const MicroporeState& s, double c, const EDLParams& p)
{
    CHECK(s.c_mi_ions >= std::abs(s.sigma_ionic));
    CHECK(s.mu_att * s.c_mi_ions == doctest::Approx(p.attraction_energy).epsilon(1e-12));
    const double b = 2.0 * c * std::exp(s.mu_att);
    CHECK(s.c_mi_ions * s.c_mi_ions - s.sigma_ionic * s.sigma_ionic ==
          doctest::Approx(b * b).epsilon(1e-10));
    if (s.sigma_ionic != 0.0) {
        CHECK(std::signbit(s.sigma_ionic) != std::signbit(s.dphi_d));
        if (std::isfinite(p.stern_capacitance)) {
            CHECK(std::signbit(s.sigma_ionic) != std::signbit(s.dphi_s));
        }
    }
}

} // namespace

TEST_CASE("mu_att is E over the micropore ion concentration")
{
    CHECK(edl::mu_att_of(700.0, 700.0) == 1.0);
    CHECK(edl::mu_att_of(350.0, 0.0) == 0.0);
    CHECK(edl::mu_att_of(350.0, 700.0) == 2.0);
    CHECK_THROWS_AS(edl::mu_att_of(0.0, 700.0), DomainError);
    CHECK_THROWS_AS(edl::mu_att_of(-1.0, 700.0), DomainError);
}

TEST_CASE("uncharged micropores")
{
    SUBCASE("without attraction the micropores hold twice the macropore salt")
    {
        const auto s = edl::zero_charge_state(5.0, no_attraction());
        CHECK(s.c_mi_ions == doctest::Approx(10.0).epsilon(1e-14));
        CHECK(s.mu_att == 0.0);
        CHECK(s.sigma_ionic == 0.0);
        CHECK(s.dphi_d == 0.0);
        CHECK(s.dphi_s == 0.0);
    }
    SUBCASE("attraction: mu e^mu = E / 2c")
    {
        for (double c : {5.0, 10.0, 0.01, 1000.0}) {
            const double k = 700.0 / (2.0 * c);
            const double mu = oracle::bisect([&](double m) { return m * std::exp(m) - k; }, 0.0, 50.0);
            const auto s = edl::zero_charge_state(c, table_params());
            CHECK(s.mu_att == doctest::Approx(mu).epsilon(1e-12));
            CHECK(s.c_mi_ions == doctest::Approx(700.0 / mu).epsilon(1e-12));
            check_invariants(s, c, table_params());
        }
        CHECK(edl::zero_charge_state(5.0, table_params()).mu_att == doctest::Approx(3.11).epsilon(0.01));
        CHECK(edl::zero_charge_state(10.0, table_params()).mu_att == doctest::Approx(2.60).epsilon(0.01));
    }
    SUBCASE("non-positive salt is rejected")
    {
        CHECK_THROWS_AS(edl::zero_charge_state(0.0, table_params()), DomainError);
        CHECK_THROWS_AS(edl::state_from_charge(-1.0, 3.0, table_params()), DomainError);
        CHECK_THROWS_AS(edl::state_from_potential(0.0, 1.0, table_params()), DomainError);
    }
}

TEST_CASE("state from charge")
{
    SUBCASE("closed form without attraction")
    {
        const auto s = edl::state_from_charge(5.0, 30.0, no_attraction());
        CHECK(s.c_mi_ions == doctest::Approx(std::sqrt(1000.0)).epsilon(1e-14));
        CHECK(s.dphi_d == doctest::Approx(-std::asinh(3.0)).epsilon(1e-14));
        CHECK(s.dphi_s == 0.0);

        const auto z = edl::state_from_charge(5.0, 0.0, no_attraction());
        CHECK(z.c_mi_ions == doctest::Approx(10.0).epsilon(1e-14));
        CHECK(z.dphi_d == 0.0);
        CHECK(z.dphi_s == 0.0);
    }
    SUBCASE("default parameters against bisection")
    {
        const auto p = table_params();
        const auto s = edl::state_from_charge(5.0, 30.0, p);
        const double cmi = oracle::bisect(
            [](double c) { return c * c - 900.0 - 100.0 * std::exp(1400.0 / c); }, 30.0, 1e4);
        CHECK(s.c_mi_ions == doctest::Approx(cmi).epsilon(1e-12));
        check_invariants(s, 5.0, p);
        const PhysicalConstants k;
        CHECK(s.dphi_s == doctest::Approx(-30.0 * k.faraday / (p.stern_capacitance * k.thermal_voltage())));
    }
    SUBCASE("odd in sigma")
    {
        const auto p = table_params();
        for (double sigma : {1e-3, 2.0, 150.0, 2500.0}) {
            const auto a = edl::state_from_charge(7.0, sigma, p);
            const auto b = edl::state_from_charge(7.0, -sigma, p);
            CHECK(a.c_mi_ions == doctest::Approx(b.c_mi_ions).epsilon(1e-14));
            CHECK(a.dphi_d == doctest::Approx(-b.dphi_d).epsilon(1e-14));
            CHECK(a.dphi_s == doctest::Approx(-b.dphi_s).epsilon(1e-14));
        }
    }
}

TEST_CASE("state from potential")
{
    SUBCASE("zero drop means zero charge")
    {
        for (double e : {0.0, 700.0}) {
            EDLParams p = table_params();
            p.attraction_energy = e;
            const auto s = edl::state_from_potential(5.0, 0.0, p);
            CHECK(s.sigma_ionic == 0.0);
            CHECK(s.c_mi_ions == doctest::Approx(edl::zero_charge_state(5.0, p).c_mi_ions).epsilon(1e-14));
        }
    }
    SUBCASE("inverse of the closed form")
    {
        const auto s = edl::state_from_potential(5.0, -std::asinh(3.0), no_attraction());
        CHECK(s.sigma_ionic == doctest::Approx(30.0).epsilon(1e-12));
    }
    SUBCASE("default parameters against bisection")
    {
        const auto p = table_params();
        const auto s = edl::state_from_potential(5.0, -5.0, p);
        CHECK(s.sigma_ionic == doctest::Approx(oracle::sigma_from_potential(5.0, -5.0, p)).epsilon(1e-10));
        CHECK(s.total_drop() == doctest::Approx(-5.0).epsilon(1e-12));
        check_invariants(s, 5.0, p);
    }
    SUBCASE("charge magnitude grows with the drop")
    {
        const auto p = table_params();
        double previous = 0.0;
        for (int k = 0; k <= 60; ++k) {
            const double u = 0.5 * k;
            const auto s = edl::state_from_potential(5.0, u, p);
            CHECK(std::abs(s.sigma_ionic) >= previous);
            previous = std::abs(s.sigma_ionic);
            const auto m = edl::state_from_potential(5.0, -u, p);
            CHECK(m.sigma_ionic == doctest::Approx(-s.sigma_ionic).epsilon(1e-12));
        }
    }
    SUBCASE("extreme drops stay finite")
    {
        const auto p = table_params();
        for (double c : {1e-4, 1e4}) {
            const auto s = edl::state_from_potential(c, -60.0, p);
            CHECK(std::isfinite(s.sigma_ionic));
            CHECK(s.total_drop() == doctest::Approx(-60.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("round trip charge -> potential -> charge")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> logc(-2.0, 3.0), sig(-3000.0, 3000.0), e(0.0, 2000.0);
    for (int k = 0; k < 200; ++k) {
        EDLParams p = table_params();
        p.attraction_energy = e(rng);
        const double c = std::pow(10.0, logc(rng));
        const double sigma = sig(rng);
        const auto a = edl::state_from_charge(c, sigma, p);
        const auto b = edl::state_from_potential(c, a.total_drop(), p);
        CHECK(b.sigma_ionic == doctest::Approx(sigma).epsilon(1e-9));
    }
}

TEST_CASE("hyperbolic identities without attraction")
{
    for (double c : {0.5, 5.0, 20.0}) {
        for (double u : {-8.0, -1.0, 0.3, 2.0, 10.0}) {
            const auto s = edl::state_from_potential(c, u, no_attraction());
            CHECK(s.sigma_ionic == doctest::Approx(-2.0 * c * std::sinh(s.dphi_d)).epsilon(1e-10));
            CHECK(s.c_mi_ions == doctest::Approx(2.0 * c * std::cosh(s.dphi_d)).epsilon(1e-10));
            CHECK((s.c_mi_ions - 2.0 * c) / std::abs(s.sigma_ionic) ==
                  doctest::Approx(std::tanh(std::abs(s.dphi_d) / 2.0)).epsilon(1e-9));
        }
    }
}

TEST_CASE("drop slope matches a centred difference")
{
    const auto p = table_params();
    for (double sigma : {-800.0, -5.0, 0.0, 40.0, 1500.0}) {
        const double c = 6.0;
        const auto s = edl::state_from_charge(c, sigma, p);
        const double h = 1e-4 * std::max(1.0, std::abs(sigma));
        const double fd = (edl::state_from_charge(c, sigma + h, p).total_drop() -
                           edl::state_from_charge(c, sigma - h, p).total_drop()) /
                          (2.0 * h);
        CHECK(edl::drop_slope(s, c, p) == doctest::Approx(fd).epsilon(1e-6));
        CHECK(edl::drop_slope(s, c, p) < 0.0);
    }
}
