#pragma once

#include "ftecdi/downstream.hpp"
#include "ftecdi/dynamics.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace ftecdi {

/// Constant-voltage charge/discharge cycle.
struct CycleSpec {
    double v_ch = 1.2;      // V
    double v_dis = 0.0;     // V
    double c_feed = 5.0;    // mol/m^3
    double flow_rate = 0.0; // m^3/s; 0 takes velocity * area from the cell
    // Half-cycle end: |I| < current_tol and |c_out - c_feed| < conc_tol_rel * c_feed.
    double current_tol = 1e-6; // A
    double conc_tol_rel = 0.01;
    double max_time = 7200.0;  // s per half-cycle
    DownstreamParams downstream;

    std::vector<std::string> violations() const;
    StopCriteria stop() const { return {current_tol, conc_tol_rel * c_feed, max_time}; }
};

struct SimulationOptions {
    std::size_t n_electrode = 40;
    std::size_t n_spacer = 10;
    SolverSettings solver;
};

struct CycleResult {
    std::vector<double> times;     // s
    std::vector<double> current;   // A
    std::vector<double> c_outlet;  // mol/m^3 at the cell exit
    std::vector<double> c_sensed;  // mol/m^3 after the downstream volume
    std::vector<double> net_charge; // mol, total micropore ionic charge of the cell
    std::size_t discharge_start = 0; // index of the sample shared by both halves

    double c_feed = 0.0;
    double flow_rate = 0.0;
    double electrode_mass = 0.0; // kg, both electrodes

    double charge_in = 0.0;   // C, integral of |I| while charging
    double charge_out = 0.0;  // C, integral of |I| while discharging
    double salt_removed = 0.0;  // mol, charge half-cycle
    double salt_released = 0.0; // mol, discharge half-cycle
    double eq_sac = 0.0;        // mg/g
    double charge_efficiency = 0.0;

    HoldStatus status = HoldStatus::equilibrated;
    std::string message;
    bool complete() const { return status == HoldStatus::equilibrated; }
};

/// Charges from the uncharged state at v_ch, then discharges at v_dis, each
/// to its stop criteria.
CycleResult run_cv_cycle(const CellParams& params, const CycleSpec& spec,
                         const SimulationOptions& options = {});

/// Trapezoid integral of values over samples [begin, end].
double trapezoid(const std::vector<double>& times, const std::vector<double>& values,
                 std::size_t begin, std::size_t end);

/// Charge recovered during discharge, C.
double charge_stored(const CycleResult& result);

/// Salt removed while charging per mass of both electrodes, mg/g.
double eq_sac(const CycleResult& result, const CycleSpec& spec, double electrode_mass);

/// Salt removed (mol) per electron stored (mol); NaN when no charge was stored.
double charge_efficiency(const CycleResult& result);

struct SweepPoint {
    EquilibriumPoint point;
    bool ok = true;
    std::string error;
};

/// solve_equilibrium at each voltage, evaluated concurrently. A failing point
/// is flagged and the rest of the sweep still runs.
std::vector<SweepPoint> equilibrium_sweep(const CellParams& params, const std::vector<double>& voltages,
                                          double c_feed);

} // namespace ftecdi
