#pragma once

#include "ftecdi/cell_transport.hpp"

#include <Eigen/Core>

#include <array>
#include <string>
#include <vector>

namespace ftecdi {

struct EquilibriumRow {
    double v_ch = 0.0;   // V
    double c_feed = 0.0; // mol/m^3
    double charge = 0.0; // C per electrode
    double eq_sac = 0.0; // mg/g
    double weight = 1.0;
};

struct EquilibriumDataset {
    std::vector<EquilibriumRow> rows;

    std::vector<std::string> violations() const;
};

/// The three fitted electrode parameters, SI units.
struct ElectrodeFit {
    double micropore_volume = 0.55e-3;  // v_mi, m^3/kg
    double attraction_energy = 700.0;   // E
    double stern_capacitance = 1.45e8;  // C_S, F/m^3

    std::array<double, 3> as_array() const { return {micropore_volume, attraction_energy, stern_capacitance}; }
    static ElectrodeFit from_array(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }
    CellParams apply(CellParams base) const;
};

struct FitBounds {
    ElectrodeFit lower{0.1e-3, 0.0, 30e6};
    ElectrodeFit upper{1.5e-3, 3000.0, 500e6};

    bool contains(const ElectrodeFit& p) const;
};

struct FitOptions {
    int max_evaluations = 4000; // per simplex run
    int restarts = 2;
    double f_tol = 1e-20;       // spread of simplex values
    double x_tol = 1e-10;       // simplex size in box-normalized coordinates
};

struct FitResult {
    ElectrodeFit params;
    double objective = 0.0;
    double residual_norm = 0.0;
    std::vector<double> row_residuals; // scaled, [charge, eq_sac] per row
    bool converged = false;
    int evaluations = 0;
};

/// Scaled residuals sqrt(w) (model - data) / rms(data), two per row.
std::vector<double> fit_residuals(const CellParams& base, const EquilibriumDataset& data,
                                  const ElectrodeFit& fit);

/// Sum of squared fit_residuals; a large penalty when the model fails.
double fit_objective(const CellParams& base, const EquilibriumDataset& data, const ElectrodeFit& fit);

/// Derivative-free simplex fit of (v_mi, E, C_S) to equilibrium charge and
/// eq-SAC. Geometry and everything else comes from `base`.
FitResult fit_equilibrium(const CellParams& base, const EquilibriumDataset& data,
                          const ElectrodeFit& initial, const FitBounds& bounds = {},
                          const FitOptions& options = {});

/// J^T J of the scaled residuals with respect to relative parameter changes.
Eigen::Matrix3d gauss_newton_hessian(const CellParams& base, const EquilibriumDataset& data,
                                     const ElectrodeFit& at);

} // namespace ftecdi
