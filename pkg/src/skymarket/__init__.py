"""Deterministic market-based time-slot allocation for satellite-drone networks."""

from .channel import RateTable, build_rate_table, satellite_rate_drift
from .equilibrium import EquilibriumReport, SolverConfig, duality_gap, run
from .market import (
    AllocationState,
    PriceState,
    check_constraints,
    is_walrasian_equilibrium,
    total_payoff,
)
from .scenario import Scenario, ScenarioError, load_scenario, sample_scenario

__all__ = [
    "AllocationState",
    "EquilibriumReport",
    "PriceState",
    "RateTable",
    "Scenario",
    "ScenarioError",
    "SolverConfig",
    "build_rate_table",
    "check_constraints",
    "duality_gap",
    "is_walrasian_equilibrium",
    "load_scenario",
    "run",
    "sample_scenario",
    "satellite_rate_drift",
    "total_payoff",
]

__version__ = "0.1.0"
