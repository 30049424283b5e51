#pragma once

#include "ftecdi/edl_donnan.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <vector>

namespace ftecdi {

/// Geometry, porosities and transport properties of the anode | spacer |
/// cathode stack. Derived quantities (porosities, tortuosities, effective
/// diffusivities) are computed from the primary fields so the
/// relations between them always hold.
struct CellParams {
    double electrode_thickness = 500e-6; // l_e, m
    double spacer_thickness = 260e-6;    // l_sp, m
    double area = 1e-6 / 60.0 / 66.4e-6; // m^2, flow rate / superficial velocity
    double spacer_porosity = 0.85;
    double skeleton_density = 1900.0;    // rho_sk, kg/m^3
    double velocity = 66.4e-6;           // superficial velocity, m/s
    EDLParams edl;
    PhysicalConstants constants;

    double micropore_porosity() const { return edl.micropore_porosity(); }
    double skeleton_porosity() const { return edl.electrode_density / skeleton_density; }
    double macropore_porosity() const { return 1.0 - micropore_porosity() - skeleton_porosity(); }
    double electrode_tortuosity() const;
    double spacer_tortuosity() const;
    double electrode_diffusivity() const; // D_mA
    double spacer_diffusivity() const;    // D_sp
    double flow_rate() const { return velocity * area; }
    /// Dry mass of both electrodes, kg.
    double electrode_mass() const { return 2.0 * edl.electrode_density * electrode_thickness * area; }

    /// Every violated invariant, one message each. Empty when valid.
    std::vector<std::string> violations() const;
    /// Throws ConfigError listing all violations.
    void validate() const;
};

enum class Region { anode, spacer, cathode };

struct Grid {
    std::size_t n_electrode = 0;
    std::size_t n_spacer = 0;
    std::vector<double> faces;   // size cells + 1
    std::vector<double> centers;
    std::vector<double> widths;
    std::vector<Region> regions;

    std::size_t cells() const { return centers.size(); }
    double length() const { return faces.back() - faces.front(); }
    bool is_electrode(std::size_t i) const { return regions[i] != Region::spacer; }
    /// Index into CellState::sigma for electrode cell i.
    std::size_t electrode_slot(std::size_t i) const
    {
        return regions[i] == Region::anode ? i : i - n_spacer;
    }
    std::size_t first_spacer() const { return n_electrode; }
    std::size_t first_cathode() const { return n_electrode + n_spacer; }
};

/// Uniform cells within each region; region boundaries fall on faces.
Grid build_grid(const CellParams& params, std::size_t n_electrode, std::size_t n_spacer);

struct CellState {
    std::vector<double> c;     // macropore / spacer salt, per cell
    std::vector<double> phi;   // electrolyte potential, per cell
    std::vector<double> sigma; // micropore ionic charge, anode cells then cathode cells
    double phi1_anode = 0.0;
    double phi1_cathode = 0.0;
    double t = 0.0;

    double cell_voltage_units() const { return phi1_anode - phi1_cathode; }
};

/// Uncharged state at uniform salt c_feed with the zero-charge micropore
/// closure, all potentials zero.
CellState uncharged_state(const Grid& grid, double c_feed);

/// Boundary data held fixed over one implicit step.
struct Drive {
    double cell_voltage = 0.0; // V
    double c_feed = 5.0;       // mol/m^3
};

/// Unknown ordering for the nonlinear system: per cell [c, phi, (sigma)],
/// cells in order, then phi1_anode and phi1_cathode. Residual rows use the
/// same ordering: [salt, charge, (closure)] per cell, then the voltage and
/// gauge rows.
class Layout {
public:
    explicit Layout(const Grid& grid);

    std::size_t size() const { return size_; }
    std::size_t c(std::size_t cell) const { return offset_[cell]; }
    std::size_t phi(std::size_t cell) const { return offset_[cell] + 1; }
    std::size_t sigma(std::size_t cell) const { return offset_[cell] + 2; }
    std::size_t phi1_anode() const { return size_ - 2; }
    std::size_t phi1_cathode() const { return size_ - 1; }
    // Global rows share positions with the phi1 unknowns.
    std::size_t voltage_row() const { return size_ - 2; }
    std::size_t gauge_row() const { return size_ - 1; }

    Eigen::VectorXd pack(const CellState& s) const;
    CellState unpack(const Eigen::VectorXd& x, double t) const;

    bool is_electrode(std::size_t cell) const { return regions_[cell] != Region::spacer; }

private:
    std::vector<Region> regions_;
    std::size_t n_spacer_ = 0;
    std::vector<std::size_t> offset_;
    std::size_t size_ = 0;
};

/// Superficial salt flux (mol/m^2/s) through an interior face between cells
/// of width dx_left/dx_right and effective diffusivity d_left/d_right.
/// Advection is upwinded; diffusion uses half-cell resistances in series so the
/// flux is single-valued across a change in diffusivity.
double face_salt_flux(double c_left, double c_right, double dx_left, double dx_right,
                      double d_left, double d_right, double velocity);

/// Ionic current density J_ch (mol/m^2/s) through the spacer, from the
/// integrated Ohmic relation between the first and last spacer cells.
double spacer_current_density(const CellState& state, const Grid& grid, const CellParams& params);

/// Electrode Peclet number v l_e / D_mA.
double peclet(const CellParams& params);

/// Per-cell storage terms of a state, reused across Newton iterations.
struct Storage {
    std::vector<double> salt;   // c_eff per cell
    std::vector<double> charge; // p_mi sigma per cell (0 in spacer)
};

Storage storage_of(const CellState& state, const Grid& grid, const CellParams& params);

/// Backward-Euler residual of the full cell system in natural units: salt and
/// charge rows in mol/m^2/s (balance over one cell per unit area), closure rows
/// and global rows dimensionless.
Eigen::VectorXd assemble_residual(const CellState& state, const CellState& previous, double dt,
                                  const Drive& drive, const Grid& grid, const CellParams& params);

Eigen::VectorXd assemble_residual(const CellState& state, const Storage& previous, double dt,
                                  const Drive& drive, const Grid& grid, const CellParams& params);

/// Total salt held in the cell per unit area, sum of c_eff * dx (mol/m^2).
double salt_inventory(const CellState& state, const Grid& grid, const CellParams& params);

/// Net ionic charge in the micropores per unit area, sum of p_mi sigma dx.
double charge_inventory(const CellState& state, const Grid& grid, const CellParams& params);

} // namespace ftecdi
