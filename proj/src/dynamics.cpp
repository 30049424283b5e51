#include "ftecdi/dynamics.hpp"

#include "ftecdi/errors.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ftecdi {

std::vector<std::string> SolverSettings::violations() const
{
    std::vector<std::string> out;
    if (!(newton_tol > 0.0)) out.push_back("newton_tol must be positive");
    if (newton_max_iter < 1) out.push_back("newton_max_iter must be at least 1");
    if (!(dt_min > 0.0)) out.push_back("dt_min must be positive");
    if (!(dt_min <= dt_init && dt_init <= dt_max)) out.push_back("need dt_min <= dt_init <= dt_max");
    if (!(step_growth >= 1.0)) out.push_back("step_growth must be >= 1");
    if (!(step_shrink > 0.0 && step_shrink < 1.0)) out.push_back("step_shrink must lie in (0, 1)");
    if (!(ramp_time >= 0.0)) out.push_back("ramp_time must be non-negative");
    if (!(max_current_change > 0.0)) out.push_back("max_current_change must be positive");
    return out;
}

CellModel::CellModel(CellParams p, std::size_t n_electrode, std::size_t n_spacer, double feed)
    : params(std::move(p)), grid(build_grid(params, n_electrode, n_spacer)), c_feed(feed)
{
    params.validate();
    if (!(c_feed > 0.0)) {
        throw ConfigError("feed concentration must be positive");
    }
}

Eigen::VectorXd residual_scaling(const CellModel& model, double dt)
{
    const Layout layout(model.grid);
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(layout.size()));
    for (std::size_t i = 0; i < model.grid.cells(); ++i) {
        const double s = dt / (model.grid.widths[i] * model.c_feed);
        scale[layout.c(i)] = s;
        scale[layout.phi(i)] = s;
    }
    return scale;
}

Eigen::SparseMatrix<double> residual_jacobian(const CellModel& model, const CellState& state,
                                              const Storage& previous, double dt,
                                              const Drive& drive)
{
    const Grid& grid = model.grid;
    const Layout layout(grid);
    const std::size_t n = grid.cells();
    const Eigen::VectorXd x0 = layout.pack(state);
    auto eval = [&](const Eigen::VectorXd& x) {
        return assemble_residual(layout.unpack(x, state.t), previous, dt, drive, grid, model.params);
    };
    const Eigen::VectorXd r0 = eval(x0);

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(n * 3 * 9 + 2 * layout.size());

    auto rows_of = [&](std::size_t cell, auto&& emit) {
        emit(layout.c(cell));
        emit(layout.phi(cell));
        if (grid.is_electrode(cell)) {
            emit(layout.sigma(cell));
        }
    };
    auto step_for = [&](double value, double typical) {
        return 1e-7 * std::max(std::abs(value), typical);
    };

    // Cells i and i+3 never share a residual row, so one evaluation serves a
    // whole stride-3 group of columns of the same kind.
    enum Kind { salt, potential, charge };
    for (int kind : {salt, potential, charge}) {
        for (std::size_t first = 0; first < 3; ++first) {
            Eigen::VectorXd x = x0;
            std::vector<std::pair<std::size_t, double>> cols; // (cell, h)
            for (std::size_t i = first; i < n; i += 3) {
                if (kind == charge && !grid.is_electrode(i)) {
                    continue;
                }
                std::size_t col = kind == salt ? layout.c(i)
                                  : kind == potential ? layout.phi(i)
                                                      : layout.sigma(i);
                const double typical = kind == potential ? 1.0 : model.c_feed;
                const double h = step_for(x0[col], typical);
                x[col] += h;
                cols.emplace_back(i, h);
            }
            if (cols.empty()) {
                continue;
            }
            const Eigen::VectorXd r = eval(x);
            for (auto [i, h] : cols) {
                const std::size_t col = kind == salt ? layout.c(i)
                                        : kind == potential ? layout.phi(i)
                                                            : layout.sigma(i);
                const std::size_t lo = i == 0 ? 0 : i - 1;
                const std::size_t hi = std::min(n - 1, i + 1);
                for (std::size_t j = lo; j <= hi; ++j) {
                    rows_of(j, [&](std::size_t row) {
                        const double d = (r[row] - r0[row]) / h;
                        if (d != 0.0) {
                            entries.emplace_back(row, col, d);
                        }
                    });
                }
            }
        }
    }

    // Electrode potentials touch every closure row of their electrode.
    for (std::size_t col : {layout.phi1_anode(), layout.phi1_cathode()}) {
        Eigen::VectorXd x = x0;
        const double h = step_for(x0[col], 1.0);
        x[col] += h;
        const Eigen::VectorXd r = eval(x);
        for (Eigen::Index row = 0; row < r.size(); ++row) {
            if (static_cast<std::size_t>(row) == layout.gauge_row()) {
                continue;
            }
            const double d = (r[row] - r0[row]) / h;
            if (d != 0.0) {
                entries.emplace_back(row, col, d);
            }
        }
    }
    entries.emplace_back(layout.gauge_row(), layout.phi(0), 1.0);

    const auto size = static_cast<Eigen::Index>(layout.size());
    Eigen::SparseMatrix<double> jac(size, size);
    jac.setFromTriplets(entries.begin(), entries.end());
    return jac;
}

StepReport step(const CellModel& model, const CellState& state, double dt, double v_cell,
                const SolverSettings& settings)
{
    if (!(dt > 0.0)) {
        throw SolverError("step: dt must be positive");
    }
    const Layout layout(model.grid);
    const Drive drive{v_cell, model.c_feed};
    const Storage previous = storage_of(state, model.grid, model.params);
    const Eigen::VectorXd scale = residual_scaling(model, dt);
    const double t_new = state.t + dt;

    Eigen::VectorXd x = layout.pack(state);
    auto scaled_residual = [&](const Eigen::VectorXd& xv) -> Eigen::VectorXd {
        return scale.cwiseProduct(
            assemble_residual(layout.unpack(xv, t_new), previous, dt, drive, model.grid, model.params));
    };

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    bool factored = false;
    Eigen::VectorXd r = scaled_residual(x);
    double norm = r.lpNorm<Eigen::Infinity>();
    int it = 0;
    for (; norm > settings.newton_tol; ++it) {
        if (it >= settings.newton_max_iter || !std::isfinite(norm)) {
            throw SolverError("Newton did not converge", norm);
        }
        Eigen::SparseMatrix<double> jac =
            residual_jacobian(model, layout.unpack(x, t_new), previous, dt, drive);
        jac = scale.asDiagonal() * jac;
        jac.makeCompressed();
        lu.compute(jac);
        if (lu.info() != Eigen::Success) {
            throw SolverError("Newton: singular Jacobian", norm);
        }
        factored = true;
        const Eigen::VectorXd delta = lu.solve(-r);

        // Keep salt positive: never remove more than 90% of a cell's content.
        double alpha = 1.0;
        for (std::size_t i = 0; i < model.grid.cells(); ++i) {
            const double d = delta[layout.c(i)];
            if (d < 0.0) {
                alpha = std::min(alpha, 0.9 * x[layout.c(i)] / -d);
            }
        }
        x += alpha * delta;
        r = scaled_residual(x);
        norm = r.lpNorm<Eigen::Infinity>();
    }
    if (factored) {
        // One more correction with the last factorization drives the balance
        // rows to rounding level.
        const Eigen::VectorXd polished = x + lu.solve(-r);
        try {
            const Eigen::VectorXd rp = scaled_residual(polished);
            if (rp.lpNorm<Eigen::Infinity>() <= norm) {
                x = polished;
                norm = rp.lpNorm<Eigen::Infinity>();
            }
        } catch (const SolverError&) {
            // keep the converged iterate
        }
    }
    return {layout.unpack(x, t_new), it, norm};
}

double cell_current(const CellModel& model, const CellState& state)
{
    return model.params.constants.faraday * model.params.area *
           spacer_current_density(state, model.grid, model.params);
}

HoldResult run_to_equilibrium(const CellModel& model, const CellState& start, double v_cell,
                              const SolverSettings& settings, const StopCriteria& stop)
{
    const double vt = model.params.constants.thermal_voltage();
    const double v_start = start.cell_voltage_units() * vt;
    const double t0 = start.t;
    auto applied = [&](double t) {
        if (settings.ramp_time <= 0.0) {
            return v_cell;
        }
        const double f = std::min(1.0, (t - t0) / settings.ramp_time);
        return v_start + (v_cell - v_start) * f;
    };
    auto record = [&](HoldResult& out, const CellState& s) {
        out.trace.push_back({s.t, cell_current(model, s), s.c.back(), applied(s.t),
                             charge_inventory(s, model.grid, model.params) * model.params.area});
    };
    auto settled = [&](const TracePoint& p) {
        return std::abs(p.current) < stop.current_tol &&
               std::abs(p.c_outlet - model.c_feed) < stop.conc_tol;
    };

    HoldResult out;
    out.state = start;
    record(out, start);
    if (std::abs(v_start - v_cell) <= 1e-12 * std::max(1.0, std::abs(v_cell)) &&
        settled(out.trace.back())) {
        return out;
    }

    double dt = settings.dt_init;
    while (true) {
        const double elapsed = out.state.t - t0;
        if (elapsed >= stop.max_time) {
            out.status = HoldStatus::max_time;
            out.message = "maximum simulated time reached before equilibrium";
            return out;
        }
        const double dt_try = std::min({dt, settings.dt_max, stop.max_time - elapsed});
        StepReport rep;
        try {
            rep = step(model, out.state, dt_try, applied(out.state.t + dt_try), settings);
        } catch (const SolverError& e) {
            ++out.rejected;
            dt = dt_try * settings.step_shrink;
            if (dt < settings.dt_min) {
                std::ostringstream msg;
                msg << "time step fell below dt_min at t = " << out.state.t << " s (last error: "
                    << e.what() << ", residual " << e.last_residual() << ")";
                out.status = HoldStatus::solver_failure;
                out.message = msg.str();
                return out;
            }
            continue;
        }
        const double i_old = out.trace.back().current;
        const double i_new = cell_current(model, rep.state);
        double change = 0.0;
        if (rep.state.t - t0 > settings.ramp_time) {
            const double scale = std::max({std::abs(i_old), std::abs(i_new), stop.current_tol});
            change = std::abs(i_new - i_old) / (settings.max_current_change * scale);
        }
        if (change > 2.0 && dt_try > settings.dt_min) {
            ++out.rejected;
            dt = std::max(dt_try * std::max(settings.step_shrink, 0.9 / change), settings.dt_min);
            continue;
        }
        out.state = std::move(rep.state);
        ++out.steps;
        record(out, out.state);
        if (rep.newton_iterations <= 3) {
            dt = dt_try * settings.step_growth;
        } else if (rep.newton_iterations >= 7) {
            dt = dt_try * settings.step_shrink;
        } else {
            dt = dt_try;
        }
        if (change > 0.0) {
            dt = std::min(dt, dt_try * 0.9 / change);
        }
        dt = std::clamp(dt, settings.dt_min, settings.dt_max);
        if (out.state.t - t0 >= settings.ramp_time && settled(out.trace.back())) {
            return out;
        }
    }
}

EquilibriumPoint solve_equilibrium(const CellParams& params, double v_cell, double c_feed)
{
    if (!(v_cell >= 0.0)) {
        throw ConfigError("equilibrium voltage must be non-negative");
    }
    if (!(c_feed > 0.0)) {
        throw ConfigError("feed concentration must be positive");
    }
    const double vt = params.constants.thermal_voltage();
    const auto zero = edl::zero_charge_state(c_feed, params.edl);
    // Identical electrodes split the voltage evenly; the anode sits above the
    // electrolyte and stores anions (negative ionic charge).
    const auto anode = edl::state_from_potential(c_feed, 0.5 * v_cell / vt, params.edl, params.constants);

    const double volume = params.micropore_porosity() * params.electrode_thickness * params.area;
    EquilibriumPoint p;
    p.v_ch = v_cell;
    p.c_feed = c_feed;
    p.sigma = std::abs(anode.sigma_ionic);
    p.charge_mol = volume * p.sigma;
    p.charge = p.charge_mol * params.constants.faraday;
    // Both electrodes hold c_mi - c_mi0 extra ions; half of them are salt.
    p.salt_mol = 2.0 * volume * (anode.c_mi_ions - zero.c_mi_ions) / 2.0;
    p.eq_sac = p.salt_mol * nacl_molar_mass / params.electrode_mass();
    p.charge_efficiency = p.charge_mol > 0.0 ? p.salt_mol / p.charge_mol
                                             : std::numeric_limits<double>::quiet_NaN();
    return p;
}

} // namespace ftecdi
