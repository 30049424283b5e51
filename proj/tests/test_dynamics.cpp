#include "ftecdi/dynamics.hpp"
#include "ftecdi/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace ftecdi;

namespace {

double max_rel(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    return (a - b).lpNorm<Eigen::Infinity>() / b.lpNorm<Eigen::Infinity>();
}

} // namespace

TEST_CASE("uncharged feed state is a fixed point at 0 V")
{
    const CellModel model(CellParams{}, 6, 3, 5.0);
    const auto s0 = uncharged_state(model.grid, 5.0);
    for (double dt : {1e-3, 1.0, 100.0}) {
        const auto rep = step(model, s0, dt, 0.0);
        for (std::size_t i = 0; i < s0.c.size(); ++i) {
            CHECK(rep.state.c[i] == doctest::Approx(5.0).epsilon(1e-12));
            CHECK(std::abs(rep.state.phi[i]) < 1e-12);
        }
        for (double s : rep.state.sigma) CHECK(std::abs(s) < 1e-9);
        CHECK(rep.state.t == doctest::Approx(dt));
    }
}

TEST_CASE("one step of the toy cell tracks an RK4 integration")
{
    CellParams p;
    const CellModel model(p, 2, 2, 5.0);
    const auto s0 = uncharged_state(model.grid, 5.0);
    const oracle::SemiDiscreteCell ode(p, model.grid, 5.0, 0.2);
    const Eigen::VectorXd y0 = ode.pack(s0);

    SolverSettings tight;
    tight.newton_tol = 1e-13;
    std::vector<double> errors;
    for (double dt : {0.02, 0.01, 0.005}) {
        const Eigen::VectorXd reference = ode.rk4(y0, dt, 1000);
        const auto rep = step(model, s0, dt, 0.2, tight);
        const Eigen::VectorXd got = ode.pack(rep.state);
        const Eigen::VectorXd change = reference - y0;
        errors.push_back((got - reference).lpNorm<Eigen::Infinity>() / change.lpNorm<Eigen::Infinity>());

        // The potentials of the step agree with the algebraic solve for its own state.
        const Eigen::VectorXd pot = ode.potentials(got);
        for (std::size_t i = 0; i < model.grid.cells(); ++i) {
            CHECK(std::abs(rep.state.phi[i] - pot[i]) <= 1e-8 * (1.0 + std::abs(pot[i])));
        }
    }
    // Local error relative to the increment is O(dt): halving dt halves it.
    CHECK(errors[0] < 0.2);
    CHECK(errors[1] / errors[0] == doctest::Approx(0.5).epsilon(0.2));
    CHECK(errors[2] / errors[1] == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("one step versus two half steps is first order")
{
    const CellModel model(CellParams{}, 6, 3, 5.0);
    auto s0 = uncharged_state(model.grid, 5.0);
    // Start from a state already carrying charge, at the held voltage.
    s0 = step(model, s0, 0.05, 0.8).state;
    s0.t = 0.0;
    std::vector<double> diffs;
    for (double dt : {0.4, 0.2, 0.1}) {
        const auto one = step(model, s0, dt, 0.8).state;
        const auto half = step(model, step(model, s0, 0.5 * dt, 0.8).state, 0.5 * dt, 0.8).state;
        double d = 0.0;
        for (std::size_t i = 0; i < one.c.size(); ++i) d = std::max(d, std::abs(one.c[i] - half.c[i]));
        diffs.push_back(d);
    }
    CHECK(diffs[0] > 0.0);
    // Each difference is a local error, O(dt^2).
    CHECK(diffs[1] / diffs[0] == doctest::Approx(0.25).epsilon(0.3));
    CHECK(diffs[2] / diffs[1] == doctest::Approx(0.25).epsilon(0.3));
}

TEST_CASE("finite-difference Jacobian against directional derivatives")
{
    const CellModel model(CellParams{}, 8, 4, 5.0);
    const Layout layout(model.grid);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    auto s = step(model, uncharged_state(model.grid, 5.0), 0.05, 1.0).state;
    for (auto& c : s.c) c *= 1.0 + 0.2 * u(rng);
    for (auto& v : s.phi) v += 0.1 * u(rng);
    for (auto& v : s.sigma) v *= 1.0 + 0.2 * u(rng);
    const auto prev = storage_of(uncharged_state(model.grid, 5.0), model.grid, model.params);
    const Drive drive{1.0, 5.0};
    const double dt = 0.1;

    const Eigen::MatrixXd jac = Eigen::MatrixXd(residual_jacobian(model, s, prev, dt, drive));
    const Eigen::VectorXd x0 = layout.pack(s);
    auto f = [&](const Eigen::VectorXd& x) {
        return assemble_residual(layout.unpack(x, 0.0), prev, dt, drive, model.grid, model.params);
    };
    const Eigen::VectorXd scale = residual_scaling(model, dt);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd dir(x0.size());
        for (Eigen::Index k = 0; k < dir.size(); ++k) dir[k] = u(rng) * std::max(1.0, std::abs(x0[k]));
        const double h = 1e-6;
        const Eigen::VectorXd directional =
            scale.cwiseProduct((f(x0 + h * dir) - f(x0 - h * dir)) / (2.0 * h));
        const Eigen::VectorXd predicted = scale.cwiseProduct(jac * dir);
        CHECK(max_rel(predicted, directional) < 1e-6);
    }
}

TEST_CASE("conservation, positivity and current during a hold")
{
    const CellModel model(CellParams{}, 20, 6, 5.0);
    const auto& g = model.grid;
    const auto& p = model.params;
    SolverSettings settings;
    StopCriteria stop;
    stop.max_time = 60.0;
    const auto hold = run_to_equilibrium(model, uncharged_state(g, 5.0), 1.2, settings, stop);
    CHECK(hold.status == HoldStatus::max_time);
    CHECK(hold.steps > 10);

    // Replay the accepted steps to check each one individually.
    auto s = uncharged_state(g, 5.0);
    double worst_salt = 0.0, worst_net = 0.0;
    const double inventory = salt_inventory(s, g, p);
    for (std::size_t k = 1; k < hold.trace.size() && k < 200; ++k) {
        const double dt = hold.trace[k].t - hold.trace[k - 1].t;
        const auto next = step(model, s, dt, hold.trace[k].voltage, settings).state;
        const double change = salt_inventory(next, g, p) - salt_inventory(s, g, p);
        const double boundary = dt * p.velocity * (model.c_feed - next.c.back());
        worst_salt = std::max(worst_salt, std::abs(change - boundary) / inventory);
        worst_net = std::max(worst_net, std::abs(charge_inventory(next, g, p)));
        for (double c : next.c) CHECK(c > 0.0);

        // Stored-charge rate in the anode equals the spacer current.
        double anode = 0.0, anode_prev = 0.0;
        for (std::size_t i = 0; i < g.n_electrode; ++i) {
            anode += p.micropore_porosity() * next.sigma[i] * g.widths[i];
            anode_prev += p.micropore_porosity() * s.sigma[i] * g.widths[i];
        }
        const double j = spacer_current_density(next, g, p);
        CHECK((anode - anode_prev) / dt == doctest::Approx(-j).epsilon(1e-6));
        s = next;
    }
    CHECK(worst_salt < 1e-12);
    const double sigma_scale = 1000.0 * p.micropore_porosity() * p.electrode_thickness;
    CHECK(worst_net < 1e-9 * sigma_scale);
}

TEST_CASE("hold at 0 V from rest returns at once")
{
    const CellModel model(CellParams{}, 6, 3, 5.0);
    const auto hold = run_to_equilibrium(model, uncharged_state(model.grid, 5.0), 0.0);
    CHECK(hold.ok());
    CHECK(hold.steps == 0);
    CHECK(hold.trace.size() == 1);
}

TEST_CASE("charge to equilibrium and back")
{
    const CellParams p;
    const CellModel model(p, 20, 6, 5.0);
    const auto eq = solve_equilibrium(p, 1.0, 5.0);
    const auto charged = run_to_equilibrium(model, uncharged_state(model.grid, 5.0), 1.0);
    REQUIRE(charged.ok());
    double anode = 0.0;
    for (std::size_t i = 0; i < model.grid.n_electrode; ++i) {
        anode += p.micropore_porosity() * charged.state.sigma[i] * model.grid.widths[i];
    }
    const double charge = std::abs(anode) * p.area * p.constants.faraday;
    CHECK(charge == doctest::Approx(eq.charge).epsilon(0.01));
    CHECK(charged.state.cell_voltage_units() * p.constants.thermal_voltage() == doctest::Approx(1.0));

    const auto back = run_to_equilibrium(model, charged.state, 0.0);
    REQUIRE(back.ok());
    double worst = 0.0;
    for (double s : back.state.sigma) worst = std::max(worst, std::abs(s));
    CHECK(worst < 0.01 * eq.sigma);
}

TEST_CASE("solver settings validation")
{
    SolverSettings s;
    CHECK(s.violations().empty());
    s.dt_min = 1.0;
    s.dt_init = 0.1;
    s.step_shrink = 1.5;
    CHECK(s.violations().size() == 2);
    CHECK_THROWS_AS(step(CellModel(CellParams{}, 3, 3, 5.0), uncharged_state(build_grid(CellParams{}, 3, 3), 5.0),
                         -1.0, 0.1),
                    SolverError);
    CHECK_THROWS_AS(CellModel(CellParams{}, 3, 3, 0.0), ConfigError);
}

TEST_CASE("equilibrium point")
{
    const CellParams p;
    SUBCASE("zero voltage")
    {
        const auto e = solve_equilibrium(p, 0.0, 5.0);
        CHECK(e.charge == 0.0);
        CHECK(e.salt_mol == doctest::Approx(0.0).scale(1e-20));
        CHECK(std::isnan(e.charge_efficiency));
    }
    SUBCASE("hyperbolic identity without attraction or Stern layer")
    {
        CellParams q = p;
        q.edl.attraction_energy = 0.0;
        q.edl.stern_capacitance = std::numeric_limits<double>::infinity();
        const double vt = q.constants.thermal_voltage();
        for (double v : {0.1, 0.4, 1.2}) {
            CHECK(solve_equilibrium(q, v, 5.0).charge_efficiency ==
                  doctest::Approx(std::tanh(v / (4.0 * vt))).epsilon(1e-10));
        }
    }
    SUBCASE("default parameters against the bisection oracle")
    {
        const double vt = p.constants.thermal_voltage();
        for (double c : {5.0, 20.0}) {
            for (double v : {0.2, 0.7, 1.2}) {
                const double sigma = oracle::sigma_from_potential(c, 0.5 * v / vt, p.edl, p.constants);
                const double cmi = oracle::c_mi_of(c, sigma, p.edl.attraction_energy);
                const double cmi0 = oracle::c_mi_of(c, 0.0, p.edl.attraction_energy);
                const auto e = solve_equilibrium(p, v, c);
                CHECK(e.sigma == doctest::Approx(std::abs(sigma)).epsilon(1e-10));
                CHECK(e.charge_efficiency == doctest::Approx((cmi - cmi0) / std::abs(sigma)).epsilon(1e-9));
                const double volume = p.micropore_porosity() * p.electrode_thickness * p.area;
                CHECK(e.charge == doctest::Approx(volume * std::abs(sigma) * p.constants.faraday).epsilon(1e-10));
                CHECK(e.eq_sac ==
                      doctest::Approx(volume * (cmi - cmi0) * 58.44 / p.electrode_mass()).epsilon(1e-9));
            }
        }
        CHECK(solve_equilibrium(p, 1.2, 5.0).charge_efficiency == doctest::Approx(0.7).epsilon(0.15 / 0.7));
    }
    SUBCASE("charge grows with voltage")
    {
        double previous = -1.0;
        for (int k = 0; k <= 12; ++k) {
            const double q = solve_equilibrium(p, 0.1 * k, 5.0).charge;
            CHECK(q > previous);
            previous = q;
        }
    }
    CHECK_THROWS_AS(solve_equilibrium(p, -0.1, 5.0), ConfigError);
    CHECK_THROWS_AS(solve_equilibrium(p, 1.0, 0.0), ConfigError);
}
