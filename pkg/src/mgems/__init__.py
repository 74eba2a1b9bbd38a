"""Deterministic community-microgrid EMS simulator.

Simulates price-threshold peak shaving and grid-interaction dispatch over
demand/price/renewable time series, with battery storage and a backup
diesel unit, and aggregates the result into energy, reliability, economic,
and emission metrics.
"""

__version__ = "0.1.0"

from .dispatch import (BACKEND, BatteryState, DispatchDecision, Gate, Intent,
                       SurplusResult, dispatch_step, initial_state,
                       price_threshold, run_arrays, run_horizon, shaving_intent,
                       soc_gate, step_battery, surplus)
from .metrics import (EconomicSummary, EmissionSummary, EnergyTotals,
                      ReliabilityStats, SimulationReport, accumulate,
                      build_report, emissions, lcoe, npc, operating_cost,
                      percent_change, renewable_fraction)
from .model import (BatterySpec, DieselSpec, EconomicsConfig, EmissionFactors,
                    EmsConfig, GridSpec, MicrogridConfig, PvSpec,
                    ValidationReport, WindSpec, validate_config)
from .profiles import (ResourceRow, StepInput, load_profile, parse_profile,
                       pv_power, resource_to_inputs, serialize_profile,
                       wind_power)
from .scenarios import (Scenario, ScenarioOutcome, apply_scenario,
                        builtin_scenario, run_matrix)

__all__ = [
    "BACKEND", "BatterySpec", "BatteryState", "DieselSpec", "DispatchDecision",
    "EconomicSummary", "EconomicsConfig", "EmissionFactors", "EmissionSummary",
    "EmsConfig", "EnergyTotals", "Gate", "GridSpec", "Intent",
    "MicrogridConfig", "PvSpec", "ReliabilityStats", "ResourceRow", "Scenario",
    "ScenarioOutcome", "SimulationReport", "StepInput", "SurplusResult",
    "ValidationReport", "WindSpec", "accumulate", "apply_scenario",
    "build_report", "builtin_scenario", "dispatch_step", "emissions",
    "initial_state", "lcoe", "load_profile", "npc", "operating_cost",
    "parse_profile", "percent_change", "price_threshold", "pv_power",
    "renewable_fraction", "resource_to_inputs", "run_arrays", "run_horizon",
    "run_matrix", "serialize_profile", "shaving_intent", "soc_gate",
    "step_battery", "surplus", "validate_config", "wind_power",
]
