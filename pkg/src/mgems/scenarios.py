"""Stress-test scenarios: perturb a base profile/config pair and compare runs.

Built-ins: S1 demand +5%, S2 PV -20% with wind -40%, S3 a 6-hour grid
outage, S4 fuel price +100%. Impact is reported as numeric per-metric deltas
against the base run; qualitative labeling is left to the reader.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .dispatch import (HorizonArrays, check_balance, initial_state,
                       price_threshold, run_arrays)
from .metrics import SimulationReport, build_report, percent_change
from .model import MicrogridConfig
from .profiles import StepInput

BUILTIN_IDS = ("S1", "S2", "S3", "S4")

BASE_KEY = "base"

# report fields compared scenario-vs-base in outcome deltas
DELTA_METRICS = ("operating_cost", "npc", "lcoe", "renewable_fraction",
                 "imported_kwh", "exported_kwh", "dg_kwh", "unserved_kwh",
                 "uptime_fraction")


@dataclass(frozen=True)
class OutageSpec:
    """A forced grid-unavailable window.

    start_step None defers to the default rule: the first step whose
    threshold-comparison value exceeds the resolved threshold. Duration is
    given in steps or in hours (converted with the configured step length).
    """

    start_step: int | None = None
    duration_steps: int | None = None
    duration_hours: float | None = None


@dataclass(frozen=True)
class Scenario:
    id: str
    demand_multiplier: float = 1.0
    pv_multiplier: float = 1.0
    wind_multiplier: float = 1.0
    fuel_price_multiplier: float = 1.0
    outage: OutageSpec | None = None


IDENTITY_SCENARIO = Scenario(id="identity")


def builtin_scenario(scenario_id: str) -> Scenario:
    """The four standard stress scenarios."""
    if scenario_id == "S1":
        return Scenario(id="S1", demand_multiplier=1.05)
    if scenario_id == "S2":
        return Scenario(id="S2", pv_multiplier=0.80, wind_multiplier=0.60)
    if scenario_id == "S3":
        return Scenario(id="S3", outage=OutageSpec(duration_hours=6.0))
    if scenario_id == "S4":
        return Scenario(id="S4", fuel_price_multiplier=2.0)
    raise ValueError(f"unknown builtin scenario: {scenario_id!r}")


def _resolve_outage(outage: OutageSpec, inputs: Sequence[StepInput],
                    config: MicrogridConfig) -> tuple[int, int]:
    if outage.duration_steps is not None:
        steps = outage.duration_steps
    elif outage.duration_hours is not None:
        steps = round(outage.duration_hours / config.step_hours)
    else:
        raise ValueError("outage needs duration_steps or duration_hours")
    if steps < 1:
        raise ValueError(f"outage duration must cover at least one step, got {steps}")
    start = outage.start_step
    if start is None:
        threshold = price_threshold([s.price for s in inputs], config.ems)
        start = next((i for i, s in enumerate(inputs) if s.price > threshold), None)
        if start is None:
            raise ValueError("no step with price above the threshold; "
                             "set the outage start explicitly")
    if start < 0 or start + steps > len(inputs):
        raise ValueError(
            f"outage window [{start}, {start + steps}) does not fit the "
            f"{len(inputs)}-step horizon")
    return start, steps


def apply_scenario(inputs: Sequence[StepInput], config: MicrogridConfig,
                   scenario: Scenario) -> tuple[list[StepInput], MicrogridConfig]:
    """Scale the profile and config per the scenario's condition changes.

    Demand/PV/wind columns scale pointwise, the outage window forces grid
    unavailability, and the fuel price scales; everything else passes
    through unchanged.
    """
    for name in ("demand_multiplier", "pv_multiplier", "wind_multiplier",
                 "fuel_price_multiplier"):
        value = getattr(scenario, name)
        if not value > 0:
            raise ValueError(f"scenario {scenario.id}: {name} must be > 0, got {value}")
    if scenario.outage is not None:
        start, steps = _resolve_outage(scenario.outage, inputs, config)
        window = range(start, start + steps)
    else:
        window = range(0)
    scaled = [
        replace(
            s,
            demand_kw=s.demand_kw * scenario.demand_multiplier,
            pv_kw=s.pv_kw * scenario.pv_multiplier,
            wind_kw=s.wind_kw * scenario.wind_multiplier,
            grid_available=False if s.index in window else s.grid_available,
        )
        for s in inputs
    ]
    new_config = replace(config, diesel=replace(
        config.diesel,
        fuel_cost_per_kwh=config.diesel.fuel_cost_per_kwh
        * scenario.fuel_price_multiplier))
    return scaled, new_config


@dataclass(frozen=True)
class ScenarioOutcome:
    scenario_id: str
    report: SimulationReport | None
    trace: HorizonArrays | None
    inputs: list[StepInput] | None
    deltas: dict[str, float | None]
    error: str | None = None


def _report_metric(report: SimulationReport, name: str) -> float | None:
    for section in (report.economics, report.energy, report.reliability):
        if hasattr(section, name):
            return getattr(section, name)
    raise AttributeError(name)


def _deltas(base: SimulationReport, new: SimulationReport) -> dict[str, float | None]:
    out: dict[str, float | None] = {}
    for name in DELTA_METRICS:
        base_value = _report_metric(base, name)
        new_value = _report_metric(new, name)
        if base_value in (None, 0) or new_value is None:
            out[name] = None
        else:
            out[name] = percent_change(base_value, new_value)
    return out


def _run_one(inputs: Sequence[StepInput], config: MicrogridConfig):
    trace = run_arrays(inputs, initial_state(config.battery), config)
    check_balance(trace, inputs)
    return trace, build_report(trace, inputs, config)


def run_matrix(inputs: Sequence[StepInput], config: MicrogridConfig,
               scenarios: Iterable[Scenario],
               max_workers: int | None = None) -> dict[str, ScenarioOutcome]:
    """Run the base case plus every scenario, returning outcomes by id.

    Scenario runs are independent and may execute in parallel; results are
    keyed, never ordered by completion, so the outcome map is deterministic.
    A failing scenario is reported in its outcome without aborting siblings.
    """
    scenario_list = list(scenarios)
    base_inputs = list(inputs)
    base_trace, base_report = _run_one(base_inputs, config)
    outcomes = {BASE_KEY: ScenarioOutcome(
        scenario_id=BASE_KEY, report=base_report, trace=base_trace,
        inputs=base_inputs, deltas={name: 0.0 for name in DELTA_METRICS})}

    def run_scenario(scenario: Scenario) -> ScenarioOutcome:
        try:
            s_inputs, s_config = apply_scenario(base_inputs, config, scenario)
            trace, report = _run_one(s_inputs, s_config)
            return ScenarioOutcome(
                scenario_id=scenario.id, report=report, trace=trace,
                inputs=s_inputs, deltas=_deltas(base_report, report))
        except Exception as exc:  # noqa: BLE001 - isolate failing scenarios
            return ScenarioOutcome(
                scenario_id=scenario.id, report=None, trace=None, inputs=None,
                deltas={name: None for name in DELTA_METRICS}, error=str(exc))

    if max_workers == 1 or len(scenario_list) <= 1:
        results = [run_scenario(s) for s in scenario_list]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(run_scenario, scenario_list))
    for outcome in results:
        outcomes[outcome.scenario_id] = outcome
    return outcomes
