#include "ftecdi/protocol.hpp"

#include "ftecdi/errors.hpp"

#include <cmath>
#include <future>
#include <limits>

namespace ftecdi {

std::vector<std::string> CycleSpec::violations() const
{
    std::vector<std::string> out;
    if (!(v_dis >= 0.0)) out.push_back("discharge voltage must be >= 0 V");
    if (!(v_ch >= v_dis)) out.push_back("charge voltage must be >= discharge voltage");
    if (!(c_feed > 0.0)) out.push_back("feed concentration must be positive");
    if (!(flow_rate >= 0.0)) out.push_back("flow rate must be positive");
    if (!(current_tol > 0.0)) out.push_back("current tolerance must be positive");
    if (!(conc_tol_rel > 0.0)) out.push_back("concentration tolerance must be positive");
    if (!(max_time > 0.0)) out.push_back("max_time must be positive");
    if (!(downstream.t_mix >= 0.0)) out.push_back("t_mix must be >= 0 s");
    if (!(downstream.t_plug >= 0.0)) out.push_back("t_plug must be >= 0 s");
    return out;
}

double trapezoid(const std::vector<double>& times, const std::vector<double>& values,
                 std::size_t begin, std::size_t end)
{
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        sum += 0.5 * (times[i + 1] - times[i]) * (values[i] + values[i + 1]);
    }
    return sum;
}

namespace {

std::vector<double> transformed(const std::vector<double>& v, auto&& f)
{
    std::vector<double> out;
    out.reserve(v.size());
    for (double x : v) {
        out.push_back(f(x));
    }
    return out;
}

double salt_removed_mol(const CycleResult& r)
{
    const auto deficit = transformed(r.c_outlet, [&](double c) { return r.c_feed - c; });
    return r.flow_rate * trapezoid(r.times, deficit, 0, r.discharge_start);
}

} // namespace

double charge_stored(const CycleResult& result)
{
    if (result.times.empty()) {
        return 0.0;
    }
    const auto magnitude = transformed(result.current, [](double i) { return std::abs(i); });
    return trapezoid(result.times, magnitude, result.discharge_start, result.times.size() - 1);
}

double eq_sac(const CycleResult& result, const CycleSpec& spec, double electrode_mass)
{
    if (!(spec.flow_rate > 0.0) || !(electrode_mass > 0.0)) {
        throw ConfigError("eq_sac needs a positive flow rate and electrode mass");
    }
    const auto deficit = transformed(result.c_outlet, [&](double c) { return spec.c_feed - c; });
    const double mol = spec.flow_rate * trapezoid(result.times, deficit, 0, result.discharge_start);
    return mol * nacl_molar_mass / electrode_mass;
}

double charge_efficiency(const CycleResult& result)
{
    const double q = charge_stored(result);
    if (!(q > 0.0)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return salt_removed_mol(result) * PhysicalConstants{}.faraday / q;
}

CycleResult run_cv_cycle(const CellParams& params, const CycleSpec& spec_in,
                         const SimulationOptions& options)
{
    CycleSpec spec = spec_in;
    if (spec.flow_rate == 0.0) {
        spec.flow_rate = params.flow_rate();
    }
    auto problems = spec.violations();
    const auto solver_problems = options.solver.violations();
    problems.insert(problems.end(), solver_problems.begin(), solver_problems.end());
    if (std::abs(spec.flow_rate - params.flow_rate()) > 1e-9 * params.flow_rate()) {
        problems.push_back("flow rate must equal superficial velocity x area");
    }
    if (!problems.empty()) {
        std::string msg = "invalid cycle:";
        for (const auto& p : problems) {
            msg += "\n  - " + p;
        }
        throw ConfigError(msg);
    }

    const CellModel model(params, options.n_electrode, options.n_spacer, spec.c_feed);
    CycleResult out;
    out.c_feed = spec.c_feed;
    out.flow_rate = spec.flow_rate;
    out.electrode_mass = params.electrode_mass();

    auto append = [&](const HoldResult& hold, bool skip_first) {
        for (std::size_t k = skip_first ? 1 : 0; k < hold.trace.size(); ++k) {
            const auto& p = hold.trace[k];
            out.times.push_back(p.t);
            out.current.push_back(p.current);
            out.c_outlet.push_back(p.c_outlet);
            out.net_charge.push_back(p.net_charge);
        }
    };

    const HoldResult charge =
        run_to_equilibrium(model, uncharged_state(model.grid, spec.c_feed), spec.v_ch, options.solver,
                           spec.stop());
    append(charge, false);
    out.discharge_start = out.times.size() - 1;
    out.status = charge.status;
    out.message = charge.message;

    HoldResult discharge;
    if (charge.ok()) {
        discharge = run_to_equilibrium(model, charge.state, spec.v_dis, options.solver, spec.stop());
        append(discharge, true);
        out.status = discharge.status;
        out.message = discharge.message;
    }

    out.c_sensed = downstream::sensed(out.times, out.c_outlet, spec.downstream, spec.c_feed);
    out.salt_removed = salt_removed_mol(out);
    const auto excess = transformed(out.c_outlet, [&](double c) { return c - spec.c_feed; });
    out.salt_released =
        out.flow_rate * trapezoid(out.times, excess, out.discharge_start, out.times.size() - 1);
    const auto magnitude = transformed(out.current, [](double i) { return std::abs(i); });
    out.charge_in = trapezoid(out.times, magnitude, 0, out.discharge_start);
    out.charge_out = charge_stored(out);
    out.eq_sac = eq_sac(out, spec, out.electrode_mass);
    out.charge_efficiency = charge_efficiency(out);
    return out;
}

std::vector<SweepPoint> equilibrium_sweep(const CellParams& params, const std::vector<double>& voltages,
                                          double c_feed)
{
    if (voltages.empty()) {
        throw ConfigError("sweep needs at least one voltage");
    }
    std::vector<std::future<SweepPoint>> jobs;
    jobs.reserve(voltages.size());
    for (double v : voltages) {
        jobs.push_back(std::async(std::launch::async, [&params, v, c_feed] {
            SweepPoint sp;
            sp.point.v_ch = v;
            sp.point.c_feed = c_feed;
            try {
                sp.point = solve_equilibrium(params, v, c_feed);
            } catch (const std::exception& e) {
                sp.ok = false;
                sp.error = e.what();
                sp.point.charge_efficiency = std::numeric_limits<double>::quiet_NaN();
            }
            return sp;
        }));
    }
    std::vector<SweepPoint> out;
    out.reserve(jobs.size());
    for (auto& j : jobs) {
        out.push_back(j.get());
    }
    return out;
}

} // namespace ftecdi
