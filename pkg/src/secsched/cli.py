"""Command-line front end: single runs, parameter sweeps, outage calibration.

Configs are flat JSON documents whose keys mirror ScenarioConfig exactly;
unknown or missing keys are hard errors so a typo cannot silently change the
physics.  All CSV output is deterministic for a given config and seed, with
floats printed to 17 significant digits so values round-trip.

Exit codes: 0 success, 1 configuration error, 2 invariant violation during a
run, 3 I/O error.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvariantViolation
from .secrecy import PARTIAL, calibrate_outage
from .simulator import _DEFAULT_RATIO_GRID, RunMetrics, ScenarioConfig, run

_INT_KEYS = ("n_antennas", "n_eves", "n_users", "a_max", "n_slots", "seed")
_FLOAT_KEYS = ("eta", "v", "p_av", "arrival_mean")
_BOOL_KEYS = ("colluding",)
_STR_KEYS = ("csi",)
_LIST_KEYS = ("theta", "power_grid", "ratio_grid")
_ALL_KEYS = frozenset(_INT_KEYS + _FLOAT_KEYS + _BOOL_KEYS + _STR_KEYS + _LIST_KEYS)

_AXIS_TO_KEY = {
    "lambda": "arrival_mean",
    "v": "v",
    "n_antennas": "n_antennas",
    "eta": "eta",
}


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def scenario_from_doc(doc: dict, source: str = "config") -> ScenarioConfig:
    """Build a ScenarioConfig from a flat key-value document, fail-closed."""
    if not isinstance(doc, dict):
        raise ConfigError(f"{source} must be a flat JSON object")
    unknown = sorted(set(doc) - _ALL_KEYS)
    if unknown:
        raise ConfigError(f"unknown {source} keys: {', '.join(unknown)}")
    required = set(_ALL_KEYS) - {"eta"}
    missing = sorted(required - set(doc))
    if missing:
        raise ConfigError(f"missing {source} keys: {', '.join(missing)}")
    if doc.get("csi") == PARTIAL and "eta" not in doc:
        raise ConfigError("missing config keys: eta (required when csi is 'partial')")
    if doc.get("csi") != PARTIAL and "eta" in doc:
        raise ConfigError("key conflict: eta is only meaningful when csi is 'partial'")

    fields = {}
    for key, value in doc.items():
        if key in _INT_KEYS:
            if not (isinstance(value, int) and not isinstance(value, bool)):
                raise ConfigError(f"{key} must be an integer, got {value!r}")
            fields[key] = value
        elif key in _FLOAT_KEYS:
            if not _is_number(value):
                raise ConfigError(f"{key} must be a number, got {value!r}")
            fields[key] = float(value)
        elif key in _BOOL_KEYS:
            if not isinstance(value, bool):
                raise ConfigError(f"{key} must be a boolean, got {value!r}")
            fields[key] = value
        elif key in _STR_KEYS:
            if not isinstance(value, str):
                raise ConfigError(f"{key} must be a string, got {value!r}")
            fields[key] = value
        else:
            if not isinstance(value, list) or not value or not all(_is_number(x) for x in value):
                raise ConfigError(f"{key} must be a non-empty list of numbers, got {value!r}")
            fields[key] = tuple(float(x) for x in value)
    config = ScenarioConfig(**fields)
    try:
        return config.validate()
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def _load_json(path: str):
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


@contextlib.contextmanager
def _open_out(path: str | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _metric_columns(k: int) -> list[str]:
    cols = [
        "weighted_admission_rate", "avg_power", "empirical_outage",
        "n_transmit_slots", "max_queue", "max_power_queue",
        "power_queue_final", "max_served_rate", "empirical_gamma",
        "queue_bound_violations",
    ]
    cols += [f"admission_rate_{i}" for i in range(k)]
    cols += [f"avg_queue_{i}" for i in range(k)]
    cols += [f"slots_served_{i}" for i in range(k)]
    return cols


def _metric_values(metrics: RunMetrics) -> list:
    values = [
        metrics.weighted_admission_rate, metrics.avg_power, metrics.empirical_outage,
        metrics.n_transmit_slots, metrics.max_queue, metrics.max_power_queue,
        metrics.power_queue_final, metrics.max_served_rate, metrics.empirical_gamma,
        metrics.queue_bound_violations,
    ]
    values += list(metrics.admission_rate)
    values += list(metrics.avg_queue)
    values += [int(s) for s in metrics.slots_served]
    return values


_CONFIG_ECHO = ("n_antennas", "n_eves", "n_users", "colluding", "csi", "eta",
                "v", "p_av", "arrival_mean", "a_max", "n_slots", "seed")


def _write_summary(fh, config: ScenarioConfig, metrics: RunMetrics):
    writer = csv.writer(fh)
    writer.writerow(list(_CONFIG_ECHO) + _metric_columns(config.n_users))
    echo = [getattr(config, key) for key in _CONFIG_ECHO]
    writer.writerow([_fmt(v) for v in echo + _metric_values(metrics)])


def _write_trace(fh, config: ScenarioConfig, metrics: RunMetrics):
    k = config.n_users
    writer = csv.writer(fh)
    header = ["slot"]
    header += [f"arrival_{i}" for i in range(k)]
    header += [f"admitted_{i}" for i in range(k)]
    header += ["user", "power", "data_fraction", "codeword_rate", "rate_cost",
               "secrecy_rate", "eavesdropper_capacity", "outage"]
    header += [f"queue_{i}" for i in range(k)]
    header += ["power_queue"]
    writer.writerow(header)
    for rec in metrics.trace:
        row = [rec.slot]
        row += list(rec.arrivals)
        row += list(rec.admissions)
        row += [rec.user, rec.power, rec.data_fraction, rec.codeword_rate,
                rec.rate_cost, rec.secrecy_rate, rec.eavesdropper_capacity, rec.outage]
        row += list(rec.queues)
        row += [rec.power_queue]
        writer.writerow([_fmt(v) for v in row])


def _trace_path(out: str | None) -> str:
    if out is None:
        return "run.trace.csv"
    p = Path(out)
    return str(p.parent / (p.stem + ".trace.csv"))


def cmd_run(args) -> int:
    doc = _load_json(args.config)
    if args.seed is not None and isinstance(doc, dict):
        doc["seed"] = args.seed
    config = scenario_from_doc(doc)
    metrics = run(config, collect_trace=args.trace)
    with _open_out(args.out) as fh:
        _write_summary(fh, config, metrics)
    if args.trace:
        with open(_trace_path(args.out), "w", newline="") as fh:
            _write_trace(fh, config, metrics)
    return 0


def _run_worker(config: ScenarioConfig) -> RunMetrics:
    return run(config)


def _sweep_points(doc: dict, seed_override: int | None):
    if not isinstance(doc, dict):
        raise ConfigError("sweep config must be a JSON object")
    allowed = {"base", "axis", "values", "seed_policy"}
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ConfigError(f"unknown sweep keys: {', '.join(unknown)}")
    missing = sorted({"base", "axis", "values"} - set(doc))
    if missing:
        raise ConfigError(f"missing sweep keys: {', '.join(missing)}")
    axis = doc["axis"]
    if axis not in _AXIS_TO_KEY:
        raise ConfigError(
            f"axis must be one of {sorted(_AXIS_TO_KEY)}, got {axis!r}"
        )
    policy = doc.get("seed_policy", "shared")
    if policy not in ("shared", "incremented"):
        raise ConfigError(f"seed_policy must be 'shared' or 'incremented', got {policy!r}")
    values = doc["values"]
    if not isinstance(values, list) or not values or not all(_is_number(v) for v in values):
        raise ConfigError("values must be a non-empty list of numbers")
    if len(set(values)) != len(values):
        raise ConfigError("values must be distinct")
    values = sorted(values)
    base = doc["base"]
    if not isinstance(base, dict):
        raise ConfigError("base must be a flat JSON object")
    key = _AXIS_TO_KEY[axis]
    points = []
    for index, value in enumerate(values):
        point = dict(base)
        if key == "n_antennas":
            if not (isinstance(value, int) and not isinstance(value, bool)):
                raise ConfigError(f"n_antennas sweep values must be integers, got {value!r}")
            point[key] = value
        else:
            point[key] = float(value)
        if seed_override is not None:
            point["seed"] = seed_override
        if policy == "incremented" and "seed" in point:
            point["seed"] = int(point["seed"]) + index
        config = scenario_from_doc(point, source=f"sweep point {axis}={value}")
        points.append((value, config))
    return axis, points


def cmd_sweep(args) -> int:
    axis, points = _sweep_points(_load_json(args.config), args.seed)
    k = points[0][1].n_users
    with _open_out(args.out) as fh:
        writer = csv.writer(fh)
        writer.writerow(["axis", "value", "seed"] + _metric_columns(k))
        configs = [config for _, config in points]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = pool.map(_run_worker, configs)
                for (value, config), metrics in zip(points, results):
                    writer.writerow([_fmt(v) for v in
                                     [axis, value, config.seed] + _metric_values(metrics)])
                    fh.flush()
        else:
            for value, config in points:
                metrics = run(config)
                writer.writerow([_fmt(v) for v in
                                 [axis, value, config.seed] + _metric_values(metrics)])
                fh.flush()
    return 0


def cmd_validate_outage(args) -> int:
    rows = calibrate_outage(
        n_antennas=args.n_antennas,
        n_eves=args.n_eves,
        eta=args.eta,
        colluding=args.colluding,
        ratio_grid=_DEFAULT_RATIO_GRID,
        samples=args.samples,
        seed=args.seed,
    )
    with _open_out(args.out) as fh:
        writer = csv.writer(fh)
        writer.writerow(["epsilon", "rate_cost", "eta_target", "eta_estimate",
                         "stderr", "n_samples", "status"])
        for row in rows:
            writer.writerow([
                _fmt(row.epsilon), _fmt(row.rate_cost), _fmt(row.eta_target),
                _fmt(row.eta_estimate), _fmt(row.stderr), _fmt(row.n_samples),
                "PASS" if row.passed else "FAIL",
            ])
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route usage problems to the config exit code
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="secsched",
        description="Secrecy-aware downlink scheduling: runs, sweeps, outage checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one scenario and write a summary row")
    p_run.add_argument("--config", required=True, help="path to a flat JSON scenario")
    p_run.add_argument("--out", default=None, help="summary CSV path (default: stdout)")
    p_run.add_argument("--trace", action="store_true",
                       help="also write a per-slot trace next to the summary")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.set_defaults(handler=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a scenario across one parameter axis")
    p_sweep.add_argument("--config", required=True, help="path to a JSON sweep config")
    p_sweep.add_argument("--out", default=None, help="sweep CSV path (default: stdout)")
    p_sweep.add_argument("--seed", type=int, default=None, help="override the base seed")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p_sweep.set_defaults(handler=cmd_sweep)

    p_val = sub.add_parser("validate-outage",
                           help="Monte-Carlo check of the partial-CSI outage design")
    p_val.add_argument("--n-antennas", type=int, default=6)
    p_val.add_argument("--n-eves", type=int, default=3)
    p_val.add_argument("--eta", type=float, required=True,
                       help="target secrecy-outage level in (0, 1)")
    p_val.add_argument("--colluding", action="store_true")
    p_val.add_argument("--samples", type=int, default=100_000)
    p_val.add_argument("--seed", type=int, default=0)
    p_val.add_argument("--out", default=None, help="calibration CSV path (default: stdout)")
    p_val.set_defaults(handler=cmd_validate_outage)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
