"""EMS core: threshold rules, battery state stepping, and horizon dispatch.

The per-step allocation rule lives in a kernel with two interchangeable
backends: a compiled extension (mgems._speedups) and a pure-Python fallback
(mgems._kernel). The compiled backend is selected at import when available;
set MGEMS_BACKEND=python or MGEMS_BACKEND=compiled to force one. Both
produce bit-identical traces.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernel
from ._kernel import (CHARGE, CURTAILED, DG, DISCHARGE, ENERGY, EXPORT,
                      IMPORT, N_COLUMNS, PV_USED, SOC, UNSERVED, WIND_USED)
from .errors import BalanceError
from .model import (THRESHOLD_FIXED, THRESHOLD_LOAD, THRESHOLD_PERCENTILE,
                    BatterySpec, EmsConfig, MicrogridConfig)
from .profiles import StepInput

BALANCE_TOLERANCE_KW = 1e-6
SOC_TOLERANCE = 1e-9

GRID_CONNECTED = "grid-connected"
ISLANDED = "islanded"


def _select_backend():
    forced = os.environ.get("MGEMS_BACKEND", "").strip().lower()
    if forced == "python":
        return _kernel.run_kernel, "python"
    try:
        from . import _speedups
    except ImportError:
        if forced == "compiled":
            raise ImportError(
                "MGEMS_BACKEND=compiled but mgems._speedups is not built")
        return _kernel.run_kernel, "python"
    return _speedups.run_kernel, "compiled"


_kernel_run, BACKEND = _select_backend()


class Intent(enum.Enum):
    CHARGE = "charge"
    DISCHARGE = "discharge"


class Gate(enum.Enum):
    PERMIT = "permit"
    DECLINE = "decline"


@dataclass(frozen=True)
class BatteryState:
    """Battery state at a step boundary: SOC fraction and stored energy."""

    soc: float
    energy_kwh: float

    @classmethod
    def from_soc(cls, soc: float, spec: BatterySpec) -> "BatteryState":
        return cls(soc=soc, energy_kwh=soc * spec.capacity_kwh)


def initial_state(spec: BatterySpec) -> BatteryState:
    """Default starting state: battery at its lower SOC bound."""
    return BatteryState.from_soc(spec.soc_min, spec)


@dataclass(frozen=True)
class DispatchDecision:
    """Complete power allocation for one step, all fields nonnegative kW.

    Exactly one of charge/discharge and one of import/export may be nonzero;
    islanded steps have zero grid exchange, and the diesel unit only runs
    islanded.
    """

    pv_used_kw: float
    wind_used_kw: float
    curtailed_kw: float
    battery_charge_kw: float
    battery_discharge_kw: float
    dg_kw: float
    grid_import_kw: float
    grid_export_kw: float
    unserved_kw: float
    mode: str

    FIELDS = ("pv_used_kw", "wind_used_kw", "curtailed_kw", "battery_charge_kw",
              "battery_discharge_kw", "dg_kw", "grid_import_kw",
              "grid_export_kw", "unserved_kw", "mode")


@dataclass(frozen=True)
class SurplusResult:
    """Signed instantaneous surplus and the energy it amounts to over a step."""

    surplus_kw: float
    surplus_kwh: float


def price_threshold(prices: Sequence[float], ems: EmsConfig) -> float:
    """Resolve the charge/discharge threshold for a horizon.

    Fixed mode passes the configured price through; percentile mode takes the
    lower-interpolation percentile of the sorted price sequence;
    load-threshold mode returns the configured load level (kW, compared
    against demand rather than price).
    """
    if ems.threshold_mode == THRESHOLD_FIXED:
        return float(ems.fixed_threshold)
    if ems.threshold_mode == THRESHOLD_LOAD:
        return float(ems.load_threshold_kw)
    if ems.threshold_mode == THRESHOLD_PERCENTILE:
        if not prices:
            raise ValueError("percentile threshold needs a nonempty price sequence")
        ordered = sorted(prices)
        index = math.floor(ems.percentile * (len(ordered) - 1))
        return ordered[index]
    raise ValueError(f"unknown threshold mode: {ems.threshold_mode!r}")


def shaving_intent(price: float, threshold: float) -> Intent:
    """Discharge above the threshold, charge at or below it."""
    return Intent.DISCHARGE if price > threshold else Intent.CHARGE


def soc_gate(state: BatteryState, intent: Intent, spec: BatterySpec) -> Gate:
    """Decline charging at the upper SOC bound and discharging at the lower."""
    if intent is Intent.CHARGE and state.soc >= spec.soc_max:
        return Gate.DECLINE
    if intent is Intent.DISCHARGE and state.soc <= spec.soc_min:
        return Gate.DECLINE
    return Gate.PERMIT


def surplus(inp: StepInput, battery_available_discharge_kw: float,
            dt_h: float) -> SurplusResult:
    """Aggregate PV+wind+battery output minus demand, as kW and kWh."""
    if dt_h <= 0:
        raise ValueError(f"dt_h must be > 0, got {dt_h}")
    kw = inp.pv_kw + inp.wind_kw + battery_available_discharge_kw - inp.demand_kw
    return SurplusResult(surplus_kw=kw, surplus_kwh=kw * dt_h)


def step_battery(state: BatteryState, charge_kw: float, discharge_kw: float,
                 dt_h: float, spec: BatterySpec) -> BatteryState:
    """Advance the battery by one step of terminal charging or discharging.

    Callers must pre-clamp powers to the SOC headroom; a resulting SOC
    outside the configured band (beyond 1e-9) is a caller bug and raises.
    """
    sqrt_eta = math.sqrt(spec.roundtrip_efficiency)
    energy = state.energy_kwh + charge_kw * sqrt_eta * dt_h \
        - (discharge_kw / sqrt_eta) * dt_h
    if spec.capacity_kwh > 0.0:
        soc = energy / spec.capacity_kwh
    else:
        soc = state.soc
    if soc < spec.soc_min - SOC_TOLERANCE or soc > spec.soc_max + SOC_TOLERANCE:
        raise ValueError(
            f"battery step left SOC at {soc}, outside "
            f"[{spec.soc_min}, {spec.soc_max}]: powers were not pre-clamped")
    return BatteryState(soc=soc, energy_kwh=energy)


@dataclass(frozen=True)
class HorizonArrays:
    """Array-valued dispatch trace for a whole horizon.

    columns is the (n, 11) kernel output matrix (see mgems._kernel for the
    column order); threshold is the resolved comparison threshold.
    """

    columns: np.ndarray
    grid_available: np.ndarray
    threshold: float
    final_energy_kwh: float

    def column(self, index: int) -> np.ndarray:
        return self.columns[:, index]

    def decision(self, i: int) -> DispatchDecision:
        row = self.columns[i]
        return DispatchDecision(
            pv_used_kw=float(row[PV_USED]),
            wind_used_kw=float(row[WIND_USED]),
            curtailed_kw=float(row[CURTAILED]),
            battery_charge_kw=float(row[CHARGE]),
            battery_discharge_kw=float(row[DISCHARGE]),
            dg_kw=float(row[DG]),
            grid_import_kw=float(row[IMPORT]),
            grid_export_kw=float(row[EXPORT]),
            unserved_kw=float(row[UNSERVED]),
            mode=GRID_CONNECTED if self.grid_available[i] else ISLANDED,
        )

    def state(self, i: int) -> BatteryState:
        row = self.columns[i]
        return BatteryState(soc=float(row[SOC]), energy_kwh=float(row[ENERGY]))

    def __len__(self) -> int:
        return self.columns.shape[0]


def _compare_values(inputs: Sequence[StepInput], ems: EmsConfig) -> np.ndarray:
    if ems.threshold_mode == THRESHOLD_LOAD:
        return np.array([s.demand_kw for s in inputs], dtype=np.float64)
    return np.array([s.price for s in inputs], dtype=np.float64)


def run_arrays(inputs: Sequence[StepInput], initial: BatteryState,
               config: MicrogridConfig,
               threshold: float | None = None) -> HorizonArrays:
    """Dispatch a horizon and return the trace as arrays.

    The threshold is resolved from the full price sequence unless given.
    """
    if not inputs:
        raise ValueError("empty horizon")
    if threshold is None:
        threshold = price_threshold([s.price for s in inputs], config.ems)
    b = config.battery
    demand = np.array([s.demand_kw for s in inputs], dtype=np.float64)
    pv = np.array([s.pv_kw for s in inputs], dtype=np.float64)
    wind = np.array([s.wind_kw for s in inputs], dtype=np.float64)
    grid_ok = np.array([1 if s.grid_available else 0 for s in inputs],
                       dtype=np.uint8)
    compare = _compare_values(inputs, config.ems)
    out = np.empty((len(inputs), N_COLUMNS), dtype=np.float64)
    final_energy = _kernel_run(
        demand, pv, wind, grid_ok, compare, float(threshold),
        config.step_hours, b.capacity_kwh, initial.energy_kwh,
        b.soc_min * b.capacity_kwh, b.soc_max * b.capacity_kwh,
        math.sqrt(b.roundtrip_efficiency), b.max_charge_kw, b.max_discharge_kw,
        config.grid.import_limit_kw, config.grid.export_limit_kw,
        config.diesel.capacity_kw, config.diesel.min_loading_fraction,
        b.soc_min, out)
    return HorizonArrays(columns=out, grid_available=grid_ok,
                         threshold=float(threshold),
                         final_energy_kwh=float(final_energy))


def balance_residuals(trace: HorizonArrays,
                      inputs: Sequence[StepInput]) -> np.ndarray:
    """Per-step power-balance residual, generation side minus load side."""
    cols = trace.columns
    demand = np.array([s.demand_kw for s in inputs], dtype=np.float64)
    supply = (cols[:, PV_USED] + cols[:, WIND_USED] + cols[:, DISCHARGE]
              + cols[:, DG] + cols[:, IMPORT])
    load = (demand - cols[:, UNSERVED]) + cols[:, CHARGE] + cols[:, EXPORT]
    return supply - load


def check_balance(trace: HorizonArrays, inputs: Sequence[StepInput]) -> None:
    """Raise BalanceError if any step's residual exceeds the tolerance."""
    residuals = balance_residuals(trace, inputs)
    worst = float(np.max(np.abs(residuals))) if len(residuals) else 0.0
    if worst > BALANCE_TOLERANCE_KW:
        step = int(np.argmax(np.abs(residuals)))
        raise BalanceError(
            f"power balance residual {worst} kW at step {step} exceeds "
            f"{BALANCE_TOLERANCE_KW} kW")


def dispatch_step(state: BatteryState, inp: StepInput, threshold: float,
                  config: MicrogridConfig) -> tuple[DispatchDecision, BatteryState]:
    """Allocate one step and advance the battery state."""
    b = config.battery
    if config.ems.threshold_mode == THRESHOLD_LOAD:
        compare = inp.demand_kw
    else:
        compare = inp.price
    row = _kernel.step_scalar(
        inp.demand_kw, inp.pv_kw, inp.wind_kw, inp.grid_available,
        compare > threshold, state.energy_kwh, config.step_hours,
        b.capacity_kwh, b.soc_min * b.capacity_kwh, b.soc_max * b.capacity_kwh,
        math.sqrt(b.roundtrip_efficiency), b.max_charge_kw, b.max_discharge_kw,
        config.grid.import_limit_kw, config.grid.export_limit_kw,
        config.diesel.capacity_kw, config.diesel.min_loading_fraction,
        b.soc_min)
    decision = DispatchDecision(
        pv_used_kw=row[PV_USED],
        wind_used_kw=row[WIND_USED],
        curtailed_kw=row[CURTAILED],
        battery_charge_kw=row[CHARGE],
        battery_discharge_kw=row[DISCHARGE],
        dg_kw=row[DG],
        grid_import_kw=row[IMPORT],
        grid_export_kw=row[EXPORT],
        unserved_kw=row[UNSERVED],
        mode=GRID_CONNECTED if inp.grid_available else ISLANDED,
    )
    return decision, BatteryState(soc=row[SOC], energy_kwh=row[ENERGY])


def run_horizon(inputs: Sequence[StepInput], initial: BatteryState,
                config: MicrogridConfig,
                threshold: float | None = None,
                ) -> list[tuple[DispatchDecision, BatteryState]]:
    """Dispatch a horizon step by step, deterministically.

    Returns one (decision, post-step battery state) pair per input.
    """
    trace = run_arrays(inputs, initial, config, threshold)
    return [(trace.decision(i), trace.state(i)) for i in range(len(inputs))]
