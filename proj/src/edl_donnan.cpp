#include "ftecdi/edl_donnan.hpp"

#include "ftecdi/detail/root_finding.hpp"
#include "ftecdi/errors.hpp"

#include <cmath>
#include <string>

namespace ftecdi::edl {

namespace {

void require_positive_salt(double c_mA, const char* where)
{
    if (!(c_mA > 0.0) || !std::isfinite(c_mA)) {
        throw DomainError(std::string(where) + ": macropore concentration must be positive, got " +
                          std::to_string(c_mA));
    }
}

void require_valid(const EDLParams& p)
{
    if (!(p.attraction_energy >= 0.0) || !std::isfinite(p.attraction_energy)) {
        throw DomainError("attraction energy E must be finite and non-negative");
    }
    if (!(p.stern_capacitance > 0.0)) {
        throw DomainError("Stern capacitance must be positive");
    }
}

// Root of mu * exp(mu) = k, solved as log(mu) + mu - log(k) = 0.
double zero_charge_mu(double k)
{
    const double log_k = std::log(k);
    auto fdf = [log_k](double mu) {
        return std::pair{std::log(mu) + mu - log_k, 1.0 / mu + 1.0};
    };
    // mu e^mu is increasing; k/(1+k) <= root <= log(1+k).
    const double lo = k / (1.0 + k) * (1.0 - 1e-12);
    const double hi = std::log1p(k) * (1.0 + 1e-12);
    return detail::safeguarded_newton(fdf, lo, hi, std::log1p(k), {}, "zero-charge attraction")
        .x;
}

// 0.5 * log(sigma^2 + a^2) from log|sigma| and log a, plus d/d(log a).
std::pair<double, double> half_log_hypot(double log_sigma, double log_a)
{
    const double diff = log_a - log_sigma;
    if (diff >= 0.0) {
        const double e = std::exp(-2.0 * diff);
        return {log_a + 0.5 * std::log1p(e), 1.0 / (1.0 + e)};
    }
    const double e = std::exp(2.0 * diff);
    return {log_sigma + 0.5 * std::log1p(e), e / (1.0 + e)};
}

MicroporeState finish(double c_mA, double sigma, double c_mi, double mu, const EDLParams& p,
                      const PhysicalConstants& k)
{
    MicroporeState s;
    s.sigma_ionic = sigma;
    s.c_mi_ions = c_mi;
    s.mu_att = mu;
    s.dphi_d = -std::asinh(sigma / (2.0 * c_mA * std::exp(mu)));
    s.dphi_s = -sigma * k.faraday / (p.stern_capacitance * k.thermal_voltage());
    return s;
}

} // namespace

double mu_att_of(double c_mi_ions, double attraction_energy)
{
    if (!(c_mi_ions > 0.0)) {
        throw DomainError("mu_att_of: micropore ion concentration must be positive");
    }
    return attraction_energy / c_mi_ions;
}

MicroporeState zero_charge_state(double c_mA, const EDLParams& params)
{
    require_positive_salt(c_mA, "zero_charge_state");
    require_valid(params);
    MicroporeState s;
    if (params.attraction_energy == 0.0) {
        s.c_mi_ions = 2.0 * c_mA;
        return s;
    }
    const double mu = zero_charge_mu(params.attraction_energy / (2.0 * c_mA));
    s.mu_att = mu;
    s.c_mi_ions = params.attraction_energy / mu;
    return s;
}

MicroporeState state_from_charge(double c_mA, double sigma, const EDLParams& params,
                                 const PhysicalConstants& constants)
{
    require_positive_salt(c_mA, "state_from_charge");
    require_valid(params);
    if (!std::isfinite(sigma)) {
        throw DomainError("state_from_charge: non-finite charge");
    }
    const double energy = params.attraction_energy;
    if (energy == 0.0) {
        return finish(c_mA, sigma, std::hypot(sigma, 2.0 * c_mA), 0.0, params, constants);
    }
    const double mu0 = zero_charge_mu(energy / (2.0 * c_mA));
    if (sigma == 0.0) {
        return finish(c_mA, 0.0, energy / mu0, mu0, params, constants);
    }

    // Unknown mu = E / c_mi. f(mu) = log(E/mu) - 0.5 log(sigma^2 + (2 c e^mu)^2)
    // is strictly decreasing; charging only lowers mu below its zero-charge value.
    const double log_sigma = std::log(std::abs(sigma));
    const double log_2c = std::log(2.0 * c_mA);
    const double log_e = std::log(energy);
    auto fdf = [&](double mu) {
        const auto [h, w] = half_log_hypot(log_sigma, log_2c + mu);
        return std::pair{log_e - std::log(mu) - h, -1.0 / mu - w};
    };
    const double c0 = energy / mu0;
    const double lo = energy / std::hypot(sigma, c0) * (1.0 - 1e-12);
    const double hi = mu0 * (1.0 + 1e-12);
    const double mu = detail::safeguarded_newton(fdf, lo, hi, 0.5 * (lo + hi), {},
                                                 "micropore ion balance")
                          .x;
    return finish(c_mA, sigma, energy / mu, mu, params, constants);
}

double drop_slope(const MicroporeState& s, double c_mA, const EDLParams& params,
                  const PhysicalConstants& constants)
{
    const double c = s.c_mi_ions;
    const double a = 2.0 * c_mA * std::exp(s.mu_att);
    const double dc = s.sigma_ionic * c / (c * c + a * a * s.mu_att);
    const double donnan = -(1.0 + s.sigma_ionic * s.mu_att * dc / c) / c;
    return donnan - constants.faraday / (params.stern_capacitance * constants.thermal_voltage());
}

MicroporeState state_from_potential(double c_mA, double dphi_total, const EDLParams& params,
                                    const PhysicalConstants& constants)
{
    require_positive_salt(c_mA, "state_from_potential");
    require_valid(params);
    if (!std::isfinite(dphi_total)) {
        throw DomainError("state_from_potential: non-finite potential");
    }
    if (dphi_total == 0.0) {
        return state_from_charge(c_mA, 0.0, params, constants);
    }
    const double target = std::abs(dphi_total);
    const double c0 = zero_charge_state(c_mA, params).c_mi_ions;

    // Each drop alone bounds the charge: the Stern drop gives
    // sigma <= C_S V_T |dphi| / F and the Donnan drop, with c_mi <= c0 at the
    // reduced attraction, gives sigma <= c0 sinh|dphi|.
    const double stern_bound =
        params.stern_capacitance * constants.thermal_voltage() * target / constants.faraday;
    const double hi = std::min(stern_bound, c0 * std::sinh(target)) * (1.0 + 1e-9);
    if (!std::isfinite(hi)) {
        throw DomainError("state_from_potential: potential drop too large to bracket");
    }

    auto fdf = [&](double m) {
        const MicroporeState s = state_from_charge(c_mA, m, params, constants);
        return std::pair{-s.total_drop() - target, -drop_slope(s, c_mA, params, constants)};
    };
    const double m = detail::safeguarded_newton(fdf, 0.0, hi, 0.5 * hi, {}, "double-layer drop").x;
    return state_from_charge(c_mA, dphi_total > 0.0 ? -m : m, params, constants);
}

} // namespace ftecdi::edl
