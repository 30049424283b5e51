#pragma once

// Modified-Donnan double-layer closure at a single point of a porous carbon
// electrode. Concentrations and charge are in mol/m^3, potentials in units of
// the thermal voltage.

namespace ftecdi {

struct PhysicalConstants {
    double faraday = 96485.33212;   // C/mol
    double gas_constant = 8.314462618; // J/(mol K)
    double temperature = 298.15;    // K
    double d_infty = 1.68e-9;       // m^2/s, (D_Na + D_Cl)/2

    double thermal_voltage() const { return gas_constant * temperature / faraday; }
};

struct EDLParams {
    double attraction_energy = 700.0;  // E, kT mol/m^3
    double stern_capacitance = 1.45e8; // C_S, F/m^3; +inf disables the Stern drop
    double micropore_volume = 0.55e-3; // v_mi, m^3/kg
    double electrode_density = 250.0;  // rho_elec, kg/m^3

    /// Micropore porosity p_mi = rho_elec * v_mi.
    double micropore_porosity() const { return electrode_density * micropore_volume; }
};

struct MicroporeState {
    double sigma_ionic = 0.0; // signed ionic charge
    double c_mi_ions = 0.0;   // total micropore ion concentration
    double dphi_d = 0.0;      // Donnan potential
    double dphi_s = 0.0;      // Stern drop
    double mu_att = 0.0;

    double total_drop() const { return dphi_d + dphi_s; }
};

namespace edl {

/// mu_att = E / c_mi_ions. Throws DomainError for c_mi_ions <= 0.
double mu_att_of(double c_mi_ions, double attraction_energy);

/// Uncharged micropore state in contact with macropore salt c_mA.
MicroporeState zero_charge_state(double c_mA, const EDLParams& params);

/// Micropore state carrying ionic charge sigma. Solves
/// c_mi^2 = sigma^2 + (2 c_mA exp(E / c_mi))^2 for c_mi, then evaluates the
/// Donnan and Stern drops.
MicroporeState state_from_charge(double c_mA, double sigma, const EDLParams& params,
                                 const PhysicalConstants& constants = {});

/// Micropore state whose total drop dphi_D + dphi_S equals dphi_total.
MicroporeState state_from_potential(double c_mA, double dphi_total, const EDLParams& params,
                                    const PhysicalConstants& constants = {});

/// d(dphi_D + dphi_S)/d(sigma) along the closure manifold at fixed c_mA.
/// Always negative.
double drop_slope(const MicroporeState& state, double c_mA, const EDLParams& params,
                  const PhysicalConstants& constants = {});

} // namespace edl
} // namespace ftecdi
