#pragma once

#include "ftecdi/cell_transport.hpp"

#include <Eigen/SparseCore>

#include <string>
#include <vector>

namespace ftecdi {

inline constexpr double nacl_molar_mass = 58.44; // g/mol

struct SolverSettings {
    double newton_tol = 1e-10; // inf-norm of the scaled residual
    int newton_max_iter = 12;
    double dt_init = 1e-3;     // s
    double dt_min = 1e-9;      // s
    double dt_max = 1.0;       // s
    double step_growth = 1.25;
    double step_shrink = 0.5;
    double ramp_time = 0.1;    // s, linear voltage ramp at the start of a hold
    // After the ramp, a step may change the cell current by at most this
    // fraction of its magnitude (the trapezoid and backward-Euler charge then
    // agree to about half this fraction).
    double max_current_change = 0.005;

    std::vector<std::string> violations() const;
};

/// A discretized cell: parameters, grid and the feed it sees.
struct CellModel {
    CellParams params;
    Grid grid;
    double c_feed = 5.0; // mol/m^3

    CellModel(CellParams p, std::size_t n_electrode, std::size_t n_spacer, double feed);
};

struct StepReport {
    CellState state;
    int newton_iterations = 0;
    double residual_norm = 0.0;
};

/// One backward-Euler step of length dt holding the cell voltage at v_cell.
/// Throws SolverError when Newton fails; the caller is expected to retry with a
/// smaller dt.
StepReport step(const CellModel& model, const CellState& state, double dt, double v_cell,
                const SolverSettings& settings = {});

/// Finite-difference Jacobian of assemble_residual with respect to the packed
/// unknowns, built column-group-wise from the three-cell stencil.
Eigen::SparseMatrix<double> residual_jacobian(const CellModel& model, const CellState& state,
                                              const Storage& previous, double dt,
                                              const Drive& drive);

/// Row scaling that turns residual rows into dimensionless increments.
Eigen::VectorXd residual_scaling(const CellModel& model, double dt);

/// Cell current (A) carried through the spacer, positive while charging.
double cell_current(const CellModel& model, const CellState& state);

struct StopCriteria {
    double current_tol = 1e-6; // A
    double conc_tol = 0.05;    // mol/m^3, |c_outlet - c_feed|
    double max_time = 7200.0;  // s of simulated time per hold
};

struct TracePoint {
    double t;
    double current;   // A
    double c_outlet;  // mol/m^3
    double voltage;   // V, applied
    double net_charge; // mol, total micropore ionic charge
};

enum class HoldStatus { equilibrated, max_time, solver_failure };

struct HoldResult {
    CellState state;
    std::vector<TracePoint> trace; // starts with the initial state
    HoldStatus status = HoldStatus::equilibrated;
    std::string message;
    int steps = 0;
    int rejected = 0;

    bool ok() const { return status == HoldStatus::equilibrated; }
};

/// Holds v_cell (reached by a linear ramp from the state's voltage) with
/// adaptive dt until the current and the outlet deviation drop below the
/// stop tolerances.
HoldResult run_to_equilibrium(const CellModel& model, const CellState& start, double v_cell,
                              const SolverSettings& settings = {}, const StopCriteria& stop = {});

/// Equilibrium of a symmetric cell held at V_ch with uniform feed salt.
struct EquilibriumPoint {
    double v_ch = 0.0;       // V
    double c_feed = 0.0;     // mol/m^3
    double sigma = 0.0;      // |micropore charge| per electrode, mol/m^3
    double charge_mol = 0.0; // electrons stored per electrode, mol
    double charge = 0.0;     // C
    double salt_mol = 0.0;   // salt removed by the cell, mol
    double eq_sac = 0.0;     // mg NaCl per g of both electrodes
    double charge_efficiency = 0.0; // NaN at zero charge
};

EquilibriumPoint solve_equilibrium(const CellParams& params, double v_cell, double c_feed);

} // namespace ftecdi
