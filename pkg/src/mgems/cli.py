"""Command-line frontend: validate configs, run simulations, run scenarios.

Exit codes: 0 success, 2 config/profile validation failure, 3 I/O failure,
4 internal invariant breach. All commands are deterministic: identical
inputs produce bit-identical output files, and nothing is written outside
the designated output directory.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import __version__
from ._kernel import (CHARGE, CURTAILED, DG, DISCHARGE, EXPORT, IMPORT,
                      PV_USED, SOC, UNSERVED, WIND_USED)
from .configio import LoadedConfig, load_config
from .dispatch import (GRID_CONNECTED, ISLANDED, HorizonArrays, check_balance,
                       initial_state, price_threshold, run_arrays)
from .errors import BalanceError, ConfigFileError, MgemsError, ProfileFormatError
from .metrics import build_report
from .model import MicrogridConfig, validate_config
from .profiles import (GENERATION_MODE, PRICE_CENTS, RESOURCE_MODE, StepInput,
                       load_profile)
from .scenarios import (BASE_KEY, BUILTIN_IDS, DELTA_METRICS, OutageSpec,
                        Scenario, builtin_scenario, run_matrix)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_INVARIANT = 4

TRACE_HEADER = ("index", "demand_kw", "price", "grid_available", "pv_kw",
                "wind_kw", "pv_used_kw", "wind_used_kw", "curtailed_kw",
                "battery_charge_kw", "battery_discharge_kw", "dg_kw",
                "grid_import_kw", "grid_export_kw", "unserved_kw", "soc",
                "threshold", "mode")


@dataclass(frozen=True)
class RunManifest:
    """Provenance record for a CLI invocation."""

    config_path: str
    profile_path: str
    profile_mode: str
    output_dir: str
    scenario_selection: tuple[str, ...]
    random_free: bool
    tool_version: str

    def to_dict(self) -> dict:
        return {
            "config_path": self.config_path,
            "profile_path": self.profile_path,
            "profile_mode": self.profile_mode,
            "output_dir": self.output_dir,
            "scenario_selection": list(self.scenario_selection),
            "random_free": self.random_free,
            "tool_version": self.tool_version,
        }


class _CommandError(Exception):
    def __init__(self, exit_code: int, message: str):
        super().__init__(message)
        self.exit_code = exit_code


def _load_inputs(args, loaded: LoadedConfig) -> list[StepInput]:
    path = Path(args.profile)
    if not path.is_file():
        raise _CommandError(EXIT_IO, f"profile file not found: {path}")
    try:
        inputs = load_profile(path, args.mode, loaded.config,
                              loaded.price_unit)
    except OSError as exc:
        raise _CommandError(EXIT_IO, f"cannot read profile {path}: {exc}")
    except (ProfileFormatError, ValueError) as exc:
        raise _CommandError(EXIT_VALIDATION, f"profile {path}: {exc}")
    if args.steps is not None:
        if args.steps < 1:
            raise _CommandError(EXIT_VALIDATION,
                                f"--steps {args.steps}: empty horizon")
        if args.steps > len(inputs):
            raise _CommandError(
                EXIT_VALIDATION,
                f"--steps {args.steps} exceeds the {len(inputs)}-step profile")
        inputs = inputs[:args.steps]
    if not inputs:
        raise _CommandError(EXIT_VALIDATION, "profile has no data rows: empty horizon")
    return inputs


def _load_validated(args) -> LoadedConfig:
    path = Path(args.config)
    if not path.is_file():
        raise _CommandError(EXIT_IO, f"config file not found: {path}")
    try:
        loaded = load_config(path)
    except ConfigFileError as exc:
        raise _CommandError(EXIT_VALIDATION, str(exc))
    report = validate_config(loaded.config)
    if not report.ok:
        raise _CommandError(EXIT_VALIDATION,
                            "invalid config:\n" + str(report))
    return loaded


def _outage_override(args) -> OutageSpec | None:
    if args.outage_start is None and args.outage_hours is None:
        return None
    if args.outage_hours is None:
        raise _CommandError(EXIT_VALIDATION,
                            "--outage-start needs --outage-hours")
    return OutageSpec(start_step=args.outage_start,
                      duration_hours=args.outage_hours)


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(float(value))  # builtin float: shortest round-trip repr
    return str(value)


def trace_csv_bytes(inputs: Sequence[StepInput], trace: HorizonArrays) -> bytes:
    """Per-step trace rows: inputs, allocation, SOC, threshold, and mode."""
    lines = [",".join(TRACE_HEADER)]
    cols = trace.columns
    for i, s in enumerate(inputs):
        mode = GRID_CONNECTED if s.grid_available else ISLANDED
        row = (s.index, s.demand_kw, s.price, s.grid_available, s.pv_kw,
               s.wind_kw, cols[i, PV_USED], cols[i, WIND_USED],
               cols[i, CURTAILED], cols[i, CHARGE], cols[i, DISCHARGE],
               cols[i, DG], cols[i, IMPORT], cols[i, EXPORT],
               cols[i, UNSERVED], cols[i, SOC], trace.threshold, mode)
        lines.append(",".join(_format_value(v) for v in row))
    return ("\n".join(lines) + "\n").encode("utf-8")


def report_json_bytes(report) -> bytes:
    return (json.dumps(report.to_dict(), indent=2) + "\n").encode("utf-8")


def _write_outputs(out_dir: Path, files: dict[str, bytes]) -> None:
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, data in files.items():
            target = out_dir / name
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(data)
    except OSError as exc:
        raise _CommandError(EXIT_IO, f"cannot write outputs: {exc}")


def _manifest(args, selection: tuple[str, ...] = ()) -> RunManifest:
    return RunManifest(
        config_path=str(args.config),
        profile_path=str(args.profile),
        profile_mode=args.mode,
        output_dir=str(args.out),
        scenario_selection=selection,
        random_free=True,
        tool_version=__version__,
    )


def _simulate_trace(inputs: list[StepInput], config: MicrogridConfig,
                    outage: OutageSpec | None):
    if outage is not None:
        from .scenarios import apply_scenario
        inputs, config = apply_scenario(
            inputs, config, Scenario(id="outage-override", outage=outage))
    trace = run_arrays(inputs, initial_state(config.battery), config)
    check_balance(trace, inputs)
    return inputs, config, trace


def cmd_simulate(args) -> int:
    loaded = _load_validated(args)
    inputs = _load_inputs(args, loaded)
    try:
        inputs, config, trace = _simulate_trace(inputs, loaded.config,
                                                _outage_override(args))
    except BalanceError as exc:
        raise _CommandError(EXIT_INVARIANT, f"internal invariant breach: {exc}")
    except ValueError as exc:
        raise _CommandError(EXIT_VALIDATION, str(exc))
    report = build_report(trace, inputs, config)
    manifest = _manifest(args)
    _write_outputs(Path(args.out), {
        "trace.csv": trace_csv_bytes(inputs, trace),
        "report.json": report_json_bytes(report),
        "manifest.json": (json.dumps(manifest.to_dict(), indent=2) + "\n")
        .encode("utf-8"),
    })
    print(f"simulated {len(inputs)} steps -> {args.out}")
    return EXIT_OK


def _select_scenarios(selection: str, loaded: LoadedConfig,
                      outage: OutageSpec | None) -> list[Scenario]:
    names: list[str]
    if selection.strip().lower() == "all":
        names = list(BUILTIN_IDS) + sorted(loaded.scenarios)
    else:
        names = [n.strip() for n in selection.split(",") if n.strip()]
        if not names:
            raise _CommandError(EXIT_VALIDATION, "empty scenario selection")
    result = []
    for name in names:
        if name == BASE_KEY:
            raise _CommandError(EXIT_VALIDATION,
                                f"scenario name {BASE_KEY!r} is reserved")
        if name in loaded.scenarios:
            scenario = loaded.scenarios[name]
        elif name in BUILTIN_IDS:
            scenario = builtin_scenario(name)
        else:
            raise _CommandError(
                EXIT_VALIDATION,
                f"unknown scenario {name!r} (builtins: {', '.join(BUILTIN_IDS)})")
        if outage is not None and scenario.outage is not None:
            scenario = Scenario(
                id=scenario.id,
                demand_multiplier=scenario.demand_multiplier,
                pv_multiplier=scenario.pv_multiplier,
                wind_multiplier=scenario.wind_multiplier,
                fuel_price_multiplier=scenario.fuel_price_multiplier,
                outage=outage)
        result.append(scenario)
    return result


def matrix_csv_bytes(outcomes, order: Sequence[str]) -> bytes:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["scenario", "error"]
                    + [f"delta_{name}_pct" for name in DELTA_METRICS])
    for name in order:
        outcome = outcomes[name]
        cells = [name, outcome.error or ""]
        for metric in DELTA_METRICS:
            value = outcome.deltas.get(metric)
            cells.append("" if value is None else repr(float(value)))
        writer.writerow(cells)
    return out.getvalue().encode("utf-8")


def cmd_scenarios(args) -> int:
    loaded = _load_validated(args)
    inputs = _load_inputs(args, loaded)
    scenario_list = _select_scenarios(args.scenarios, loaded,
                                      _outage_override(args))
    try:
        outcomes = run_matrix(inputs, loaded.config, scenario_list,
                              max_workers=args.workers)
    except BalanceError as exc:
        raise _CommandError(EXIT_INVARIANT, f"internal invariant breach: {exc}")
    except ValueError as exc:
        raise _CommandError(EXIT_VALIDATION, str(exc))

    order = [s.id for s in scenario_list]
    files = {"matrix.csv": matrix_csv_bytes(outcomes, order)}
    for name in [BASE_KEY] + order:
        outcome = outcomes[name]
        if outcome.error is not None:
            print(f"scenario {name} failed: {outcome.error}", file=sys.stderr)
            continue
        files[f"{name}/trace.csv"] = trace_csv_bytes(outcome.inputs, outcome.trace)
        files[f"{name}/report.json"] = report_json_bytes(outcome.report)
    manifest = _manifest(args, tuple(order))
    files["manifest.json"] = (json.dumps(manifest.to_dict(), indent=2) + "\n") \
        .encode("utf-8")
    _write_outputs(Path(args.out), files)
    print(f"ran base + {len(order)} scenario(s) -> {args.out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    path = Path(args.config)
    if not path.is_file():
        raise _CommandError(EXIT_IO, f"config file not found: {path}")
    try:
        loaded = load_config(path)
    except ConfigFileError as exc:
        raise _CommandError(EXIT_VALIDATION, str(exc))
    report = validate_config(loaded.config)
    if not report.ok:
        for violation in report.violations:
            print(violation, file=sys.stderr)
        return EXIT_VALIDATION

    config = loaded.config
    print("config: OK")
    print(f"pv: {config.pv.capacity_kw} kW | wind: {config.wind.capacity_kw} kW | "
          f"diesel: {config.diesel.capacity_kw} kW | "
          f"battery: {config.battery.capacity_kwh} kWh | "
          f"grid: {config.grid.import_limit_kw} kW import / "
          f"{config.grid.export_limit_kw} kW export")
    if loaded.price_unit == PRICE_CENTS:
        print("price unit: cents_per_kwh (prices divided by 100 at ingestion)")
    else:
        print("price unit: currency_per_kwh")
    if args.profile is not None:
        args.steps = None
        inputs = _load_inputs(args, loaded)
        print(f"horizon: {len(inputs)} steps x {config.step_hours} h")
        try:
            threshold = price_threshold([s.price for s in inputs], config.ems)
        except ValueError as exc:
            raise _CommandError(EXIT_VALIDATION, str(exc))
        print(f"threshold: {threshold!r} ({config.ems.threshold_mode})")
    return EXIT_OK


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mgems",
        description="Deterministic community-microgrid EMS simulator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, profile_required=True):
        p.add_argument("--config", required=True, help="config file (INI)")
        p.add_argument("--profile", required=profile_required,
                       help="profile CSV")
        p.add_argument("--mode", choices=(GENERATION_MODE, RESOURCE_MODE),
                       default=GENERATION_MODE, help="profile flavour")
        p.add_argument("--steps", type=int, default=None,
                       help="use only the first N profile steps")
        p.add_argument("--outage-start", type=int, default=None,
                       help="force a grid outage starting at this step")
        p.add_argument("--outage-hours", type=float, default=None,
                       help="forced outage duration in hours")

    p_sim = sub.add_parser("simulate", help="run one horizon, write trace + report")
    add_common(p_sim)
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.set_defaults(func=cmd_simulate)

    p_scen = sub.add_parser("scenarios",
                            help="run the base case plus stress scenarios")
    add_common(p_scen)
    p_scen.add_argument("--out", required=True, help="output directory")
    p_scen.add_argument("--scenarios", required=True,
                        help="comma-separated ids, or 'all'")
    p_scen.add_argument("--workers", type=int, default=None,
                        help="parallel scenario workers (default: auto)")
    p_scen.set_defaults(func=cmd_scenarios)

    p_val = sub.add_parser("validate", help="check config and profile, print summary")
    p_val.add_argument("--config", required=True)
    p_val.add_argument("--profile", default=None)
    p_val.add_argument("--mode", choices=(GENERATION_MODE, RESOURCE_MODE),
                       default=GENERATION_MODE)
    p_val.set_defaults(func=cmd_validate)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        return args.func(args)
    except _CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except BalanceError as exc:
        print(f"error: internal invariant breach: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except MgemsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
