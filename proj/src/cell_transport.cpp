#include "ftecdi/cell_transport.hpp"

#include "ftecdi/errors.hpp"

#include <cmath>
#include <sstream>

namespace ftecdi {

double CellParams::electrode_tortuosity() const { return 1.0 / std::sqrt(macropore_porosity()); }

double CellParams::spacer_tortuosity() const { return 1.0 / std::sqrt(spacer_porosity); }

double CellParams::electrode_diffusivity() const
{
    return constants.d_infty * macropore_porosity() / electrode_tortuosity();
}

double CellParams::spacer_diffusivity() const
{
    return constants.d_infty * spacer_porosity / spacer_tortuosity();
}

std::vector<std::string> CellParams::violations() const
{
    std::vector<std::string> out;
    auto positive = [&](double v, const char* name, const char* unit) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            std::ostringstream msg;
            msg << name << " must be positive and finite (" << unit << "), got " << v;
            out.push_back(msg.str());
        }
    };
    auto fraction = [&](double v, const char* name) {
        if (!(v > 0.0 && v < 1.0)) {
            std::ostringstream msg;
            msg << name << " must lie in (0, 1), got " << v;
            out.push_back(msg.str());
        }
    };
    positive(electrode_thickness, "electrode thickness", "m");
    positive(spacer_thickness, "spacer thickness", "m");
    positive(area, "cross-sectional area", "m^2");
    positive(velocity, "superficial velocity", "m/s");
    positive(skeleton_density, "skeleton density", "kg/m^3");
    positive(edl.electrode_density, "electrode density", "kg/m^3");
    positive(edl.micropore_volume, "micropore volume", "m^3/kg");
    positive(constants.d_infty, "free-solution diffusivity", "m^2/s");
    positive(constants.temperature, "temperature", "K");
    fraction(spacer_porosity, "spacer porosity");
    fraction(micropore_porosity(), "micropore porosity");
    fraction(skeleton_porosity(), "skeleton porosity");
    fraction(macropore_porosity(), "macropore porosity (1 - p_mi - p_sk)");
    if (!(edl.attraction_energy >= 0.0) || !std::isfinite(edl.attraction_energy)) {
        out.push_back("attraction energy E must be finite and non-negative");
    }
    if (!(edl.stern_capacitance > 0.0)) {
        out.push_back("Stern capacitance must be positive (F/m^3)");
    }
    return out;
}

void CellParams::validate() const
{
    const auto v = violations();
    if (v.empty()) {
        return;
    }
    std::string msg = "invalid cell parameters:";
    for (const auto& m : v) {
        msg += "\n  - " + m;
    }
    throw ConfigError(msg);
}

Grid build_grid(const CellParams& params, std::size_t n_electrode, std::size_t n_spacer)
{
    if (n_electrode < 2 || n_spacer < 2) {
        throw ConfigError("grid needs at least 2 cells per electrode and 2 in the spacer");
    }
    const double le = params.electrode_thickness;
    const double lsp = params.spacer_thickness;
    Grid g;
    g.n_electrode = n_electrode;
    g.n_spacer = n_spacer;

    auto add_region = [&](double start, double length, std::size_t n, Region r) {
        const double w = length / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) {
            g.widths.push_back(w);
            g.regions.push_back(r);
            if (k > 0) {
                g.faces.push_back(start + static_cast<double>(k) * w);
            }
        }
        g.faces.push_back(start + length);
    };
    g.faces.push_back(0.0);
    add_region(0.0, le, n_electrode, Region::anode);
    add_region(le, lsp, n_spacer, Region::spacer);
    add_region(le + lsp, le, n_electrode, Region::cathode);
    for (std::size_t i = 0; i + 1 < g.faces.size(); ++i) {
        g.centers.push_back(0.5 * (g.faces[i] + g.faces[i + 1]));
    }
    return g;
}

CellState uncharged_state(const Grid& grid, double c_feed)
{
    CellState s;
    s.c.assign(grid.cells(), c_feed);
    s.phi.assign(grid.cells(), 0.0);
    s.sigma.assign(2 * grid.n_electrode, 0.0);
    return s;
}

Layout::Layout(const Grid& grid) : regions_(grid.regions), n_spacer_(grid.n_spacer)
{
    offset_.reserve(grid.cells());
    for (std::size_t i = 0; i < grid.cells(); ++i) {
        offset_.push_back(size_);
        size_ += grid.is_electrode(i) ? 3 : 2;
    }
    size_ += 2;
}

Eigen::VectorXd Layout::pack(const CellState& s) const
{
    Eigen::VectorXd x(static_cast<Eigen::Index>(size_));
    std::size_t slot = 0;
    for (std::size_t i = 0; i < offset_.size(); ++i) {
        x[c(i)] = s.c[i];
        x[phi(i)] = s.phi[i];
        if (is_electrode(i)) {
            x[sigma(i)] = s.sigma[slot++];
        }
    }
    x[phi1_anode()] = s.phi1_anode;
    x[phi1_cathode()] = s.phi1_cathode;
    return x;
}

CellState Layout::unpack(const Eigen::VectorXd& x, double t) const
{
    CellState s;
    const std::size_t n = offset_.size();
    s.c.resize(n);
    s.phi.resize(n);
    s.sigma.reserve(n - n_spacer_);
    for (std::size_t i = 0; i < n; ++i) {
        s.c[i] = x[c(i)];
        s.phi[i] = x[phi(i)];
        if (is_electrode(i)) {
            s.sigma.push_back(x[sigma(i)]);
        }
    }
    s.phi1_anode = x[phi1_anode()];
    s.phi1_cathode = x[phi1_cathode()];
    s.t = t;
    return s;
}

double face_salt_flux(double c_left, double c_right, double dx_left, double dx_right,
                      double d_left, double d_right, double velocity)
{
    const double resistance = 0.5 * dx_left / d_left + 0.5 * dx_right / d_right;
    const double upwind = velocity >= 0.0 ? c_left : c_right;
    return velocity * upwind - (c_right - c_left) / resistance;
}

double spacer_current_density(const CellState& state, const Grid& grid, const CellParams& params)
{
    const std::size_t first = grid.first_spacer();
    const std::size_t last = grid.first_cathode() - 1;
    // Discrete form of integral(dx / c) between the outer spacer cell centres.
    double inv_c_integral = 0.0;
    for (std::size_t i = first; i < last; ++i) {
        inv_c_integral += 0.5 * grid.widths[i] / state.c[i] + 0.5 * grid.widths[i + 1] / state.c[i + 1];
    }
    return -2.0 * params.spacer_diffusivity() * (state.phi[last] - state.phi[first]) / inv_c_integral;
}

double peclet(const CellParams& params)
{
    return params.velocity * params.electrode_thickness / params.electrode_diffusivity();
}

namespace {

struct CellCoefficients {
    std::vector<double> diffusivity;
    std::vector<double> porosity;
};

CellCoefficients coefficients(const Grid& grid, const CellParams& params)
{
    CellCoefficients k;
    const double d_e = params.electrode_diffusivity();
    const double d_sp = params.spacer_diffusivity();
    const double p_e = params.macropore_porosity();
    for (std::size_t i = 0; i < grid.cells(); ++i) {
        const bool electrode = grid.is_electrode(i);
        k.diffusivity.push_back(electrode ? d_e : d_sp);
        k.porosity.push_back(electrode ? p_e : params.spacer_porosity);
    }
    return k;
}

void check_state(const CellState& s, const Grid& grid)
{
    if (s.c.size() != grid.cells() || s.phi.size() != grid.cells() ||
        s.sigma.size() != 2 * grid.n_electrode) {
        throw SolverError("cell state does not match grid");
    }
    auto finite = [](double v) { return std::isfinite(v); };
    for (std::size_t i = 0; i < grid.cells(); ++i) {
        if (!finite(s.c[i]) || !finite(s.phi[i])) {
            throw SolverError("evaluation error: non-finite cell state");
        }
        if (!(s.c[i] > 0.0)) {
            throw DomainError("evaluation error: non-positive salt concentration");
        }
    }
    for (double v : s.sigma) {
        if (!finite(v)) {
            throw SolverError("evaluation error: non-finite micropore charge");
        }
    }
    if (!finite(s.phi1_anode) || !finite(s.phi1_cathode)) {
        throw SolverError("evaluation error: non-finite electrode potential");
    }
}

} // namespace

Storage storage_of(const CellState& state, const Grid& grid, const CellParams& params)
{
    check_state(state, grid);
    const auto k = coefficients(grid, params);
    const double p_mi = params.micropore_porosity();
    Storage out;
    out.salt.resize(grid.cells());
    out.charge.assign(grid.cells(), 0.0);
    for (std::size_t i = 0; i < grid.cells(); ++i) {
        out.salt[i] = k.porosity[i] * state.c[i];
        if (grid.is_electrode(i)) {
            const double sigma = state.sigma[grid.electrode_slot(i)];
            const auto micro = edl::state_from_charge(state.c[i], sigma, params.edl, params.constants);
            out.salt[i] += 0.5 * p_mi * micro.c_mi_ions;
            out.charge[i] = p_mi * sigma;
        }
    }
    return out;
}

Eigen::VectorXd assemble_residual(const CellState& state, const CellState& previous, double dt,
                                  const Drive& drive, const Grid& grid, const CellParams& params)
{
    return assemble_residual(state, storage_of(previous, grid, params), dt, drive, grid, params);
}

Eigen::VectorXd assemble_residual(const CellState& state, const Storage& previous, double dt,
                                  const Drive& drive, const Grid& grid, const CellParams& params)
{
    check_state(state, grid);
    if (!(dt > 0.0) || !std::isfinite(drive.cell_voltage) || !(drive.c_feed > 0.0)) {
        throw SolverError("evaluation error: invalid time step or drive");
    }
    const std::size_t n = grid.cells();
    const auto k = coefficients(grid, params);
    const double v = params.velocity;
    const double p_mi = params.micropore_porosity();
    const Layout layout(grid);

    // Face fluxes; face i sits between cells i-1 and i.
    std::vector<double> salt_flux(n + 1);
    std::vector<double> current(n + 1, 0.0);
    salt_flux[0] = v * drive.c_feed; // Danckwerts inlet: v c_feed = v c(0) - D dc/dx
    salt_flux[n] = v * state.c[n - 1];
    for (std::size_t f = 1; f < n; ++f) {
        const std::size_t l = f - 1;
        const std::size_t r = f;
        salt_flux[f] = face_salt_flux(state.c[l], state.c[r], grid.widths[l], grid.widths[r],
                                      k.diffusivity[l], k.diffusivity[r], v);
        const double kappa_l = 2.0 * k.diffusivity[l] * state.c[l];
        const double kappa_r = 2.0 * k.diffusivity[r] * state.c[r];
        const double resistance = 0.5 * grid.widths[l] / kappa_l + 0.5 * grid.widths[r] / kappa_r;
        current[f] = -(state.phi[r] - state.phi[l]) / resistance;
    }

    Eigen::VectorXd res(static_cast<Eigen::Index>(layout.size()));
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = grid.widths[i];
        double salt_now = k.porosity[i] * state.c[i];
        double charge_now = 0.0;
        if (grid.is_electrode(i)) {
            const double sigma = state.sigma[grid.electrode_slot(i)];
            const auto micro = edl::state_from_charge(state.c[i], sigma, params.edl, params.constants);
            salt_now += 0.5 * p_mi * micro.c_mi_ions;
            charge_now = p_mi * sigma;
            const double phi1 =
                grid.regions[i] == Region::anode ? state.phi1_anode : state.phi1_cathode;
            res[layout.sigma(i)] = phi1 - state.phi[i] - micro.total_drop();
        }
        res[layout.c(i)] =
            (salt_now - previous.salt[i]) * dx / dt + salt_flux[i + 1] - salt_flux[i];
        res[layout.phi(i)] =
            (charge_now - previous.charge[i]) * dx / dt + current[i + 1] - current[i];
    }
    res[layout.voltage_row()] = state.phi1_anode - state.phi1_cathode -
                                drive.cell_voltage / params.constants.thermal_voltage();
    res[layout.gauge_row()] = state.phi[0];
    return res;
}

double salt_inventory(const CellState& state, const Grid& grid, const CellParams& params)
{
    const auto s = storage_of(state, grid, params);
    double total = 0.0;
    for (std::size_t i = 0; i < grid.cells(); ++i) {
        total += s.salt[i] * grid.widths[i];
    }
    return total;
}

double charge_inventory(const CellState& state, const Grid& grid, const CellParams& params)
{
    const double p_mi = params.micropore_porosity();
    double total = 0.0;
    for (std::size_t i = 0; i < grid.cells(); ++i) {
        if (grid.is_electrode(i)) {
            total += p_mi * state.sigma[grid.electrode_slot(i)] * grid.widths[i];
        }
    }
    return total;
}

} // namespace ftecdi
