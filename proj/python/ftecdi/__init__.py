"""Flow-through electrode CDI cell: equilibrium, dynamic cycles and fitting."""

from ._core import (
    CellParams,
    ConfigError,
    CycleSpec,
    ElectrodeFit,
    SolverError,
    equilibrium,
    fit_equilibrium,
    peclet,
    simulate,
    state_from_charge,
    state_from_potential,
    sweep,
    zero_charge_state,
)

__all__ = [
    "CellParams",
    "ConfigError",
    "CycleSpec",
    "ElectrodeFit",
    "SolverError",
    "equilibrium",
    "fit_equilibrium",
    "peclet",
    "simulate",
    "state_from_charge",
    "state_from_potential",
    "sweep",
    "zero_charge_state",
]
