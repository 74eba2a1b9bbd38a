"""Time-series ingestion and renewable resource-to-power conversion.

Two profile flavours are supported: generation mode carries ready-made PV and
wind power columns; resource mode carries irradiance and wind speed, which
are converted through the configured component models. Files are plain CSV
with a mandatory header (see GENERATION_HEADER / RESOURCE_HEADER).
"""

from __future__ import annotations

import io
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

from .errors import ProfileFormatError
from .model import MicrogridConfig, PvSpec, WindSpec

GENERATION_MODE = "generation"
RESOURCE_MODE = "resource"

GENERATION_HEADER = ("index", "demand_kw", "price", "grid_available", "pv_kw", "wind_kw")
RESOURCE_HEADER = ("index", "demand_kw", "price", "grid_available",
                   "irradiance_wm2", "wind_speed_ms")

PRICE_CURRENCY = "currency_per_kwh"
PRICE_CENTS = "cents_per_kwh"

# reference irradiance (W/m^2) at which a PV array delivers rated output
STANDARD_IRRADIANCE_WM2 = 1000.0


@dataclass(frozen=True)
class StepInput:
    """One step's exogenous state: demand, price, and available generation."""

    index: int
    demand_kw: float
    price: float          # currency/kWh
    grid_available: bool
    pv_kw: float
    wind_kw: float


@dataclass(frozen=True)
class ResourceRow:
    """One step's raw resource measurements before power conversion."""

    index: int
    demand_kw: float
    price: float
    grid_available: bool
    irradiance_wm2: float
    wind_speed_ms: float


def _parse_float(text: str, line_no: int, column: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ProfileFormatError(
            f"line {line_no}, column {column}: not a number: {text!r}") from None


def _parse_flag(text: str, line_no: int) -> bool:
    if text == "1":
        return True
    if text == "0":
        return False
    raise ProfileFormatError(
        f"line {line_no}, column grid_available: expected 1 or 0, got {text!r}")


def _require_nonneg(value: float, line_no: int, column: str) -> float:
    if value < 0:
        raise ProfileFormatError(
            f"line {line_no}, column {column}: must be >= 0, got {value}")
    return value


def parse_profile(data: bytes, mode: str) -> list[StepInput] | list[ResourceRow]:
    """Parse a profile file into per-step records.

    Records are returned in file order with indices renumbered 0..n-1.
    Raises ProfileFormatError naming the 1-based line number and column for
    any malformed or negative-valued field.
    """
    if mode == GENERATION_MODE:
        header = GENERATION_HEADER
    elif mode == RESOURCE_MODE:
        header = RESOURCE_HEADER
    else:
        raise ValueError(f"unknown profile mode: {mode!r}")

    text = data.decode("utf-8")
    lines = text.splitlines()
    if not lines:
        raise ProfileFormatError("empty file: expected a header row")
    got = tuple(name.strip() for name in lines[0].split(","))
    if got != header:
        raise ProfileFormatError(
            f"line 1: expected header {','.join(header)!r}, got {lines[0]!r}")

    records: list = []
    position = 0
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != len(header):
            raise ProfileFormatError(
                f"line {line_no}: expected {len(header)} fields, got {len(fields)}")
        _parse_float(fields[0], line_no, "index")  # must be numeric; file order wins
        demand = _require_nonneg(_parse_float(fields[1], line_no, "demand_kw"),
                                 line_no, "demand_kw")
        price = _require_nonneg(_parse_float(fields[2], line_no, "price"),
                                line_no, "price")
        grid_available = _parse_flag(fields[3], line_no)
        a = _require_nonneg(_parse_float(fields[4], line_no, header[4]),
                            line_no, header[4])
        b = _require_nonneg(_parse_float(fields[5], line_no, header[5]),
                            line_no, header[5])
        if mode == GENERATION_MODE:
            records.append(StepInput(position, demand, price, grid_available, a, b))
        else:
            records.append(ResourceRow(position, demand, price, grid_available, a, b))
        position += 1
    return records


def serialize_profile(records: Sequence[StepInput] | Sequence[ResourceRow]) -> bytes:
    """Write records back to the CSV wire format (inverse of parse_profile)."""
    out = io.StringIO()
    if records and isinstance(records[0], ResourceRow):
        header = RESOURCE_HEADER
        fields = ("irradiance_wm2", "wind_speed_ms")
    else:
        header = GENERATION_HEADER
        fields = ("pv_kw", "wind_kw")
    out.write(",".join(header) + "\n")
    for rec in records:
        out.write(f"{rec.index},{rec.demand_kw!r},{rec.price!r},"
                  f"{1 if rec.grid_available else 0},"
                  f"{getattr(rec, fields[0])!r},{getattr(rec, fields[1])!r}\n")
    return out.getvalue().encode("utf-8")


def pv_power(irradiance_wm2: float, spec: PvSpec) -> float:
    """PV output for a global horizontal irradiance, in kW.

    Rated output scaled by the derating factor and normalized irradiance,
    clamped at the reference irradiance.
    """
    if irradiance_wm2 < 0:
        raise ValueError(f"irradiance must be >= 0, got {irradiance_wm2}")
    ratio = irradiance_wm2 / STANDARD_IRRADIANCE_WM2
    if ratio > 1.0:
        ratio = 1.0
    return spec.capacity_kw * spec.derating_factor * ratio


def wind_power(speed_ms: float, spec: WindSpec) -> float:
    """Wind fleet output for a measured speed, in kW.

    The measured speed is shear-corrected to hub height, then mapped through
    a piecewise curve: zero below cut-in and at/above cut-out, rated between
    the rated speed and cut-out, cubic interpolation in between.
    """
    if speed_ms < 0:
        raise ValueError(f"wind speed must be >= 0, got {speed_ms}")
    v = speed_ms * (spec.hub_height_m / spec.anemometer_height_m) ** spec.shear_exponent
    if v < spec.cut_in_ms or v >= spec.cut_out_ms:
        return 0.0
    if v >= spec.rated_speed_ms:
        return spec.capacity_kw
    ci3 = spec.cut_in_ms ** 3
    return spec.capacity_kw * (v ** 3 - ci3) / (spec.rated_speed_ms ** 3 - ci3)


def resource_to_inputs(rows: Sequence[ResourceRow],
                       config: MicrogridConfig) -> list[StepInput]:
    """Convert resource rows to dispatch inputs via the component models."""
    return [
        StepInput(
            index=row.index,
            demand_kw=row.demand_kw,
            price=row.price,
            grid_available=row.grid_available,
            pv_kw=pv_power(row.irradiance_wm2, config.pv),
            wind_kw=wind_power(row.wind_speed_ms, config.wind),
        )
        for row in rows
    ]


def convert_prices(records: Sequence[StepInput], price_unit: str) -> list[StepInput]:
    """Normalize the price column to currency/kWh at ingestion."""
    if price_unit == PRICE_CURRENCY:
        return list(records)
    if price_unit == PRICE_CENTS:
        return [replace(r, price=r.price / 100.0) for r in records]
    raise ValueError(f"unknown price unit: {price_unit!r}")


def load_profile(path: str | Path, mode: str, config: MicrogridConfig,
                 price_unit: str = PRICE_CURRENCY) -> list[StepInput]:
    """Read a profile file and return normalized dispatch inputs."""
    data = Path(path).read_bytes()
    records = parse_profile(data, mode)
    if mode == RESOURCE_MODE:
        inputs = resource_to_inputs(records, config)
    else:
        inputs = list(records)
    return convert_prices(inputs, price_unit)
