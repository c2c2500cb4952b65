"""Command-line harness for sweeps, validation and ledger dumps.

Four subcommands: ``sweep-k`` walks the priority group size,
``sweep-shift`` walks the service-time shift, ``validate`` runs the
named self-checks and ``ledger`` dumps raw per-interval draws.  Options
may come from a ``key=value`` config file via ``--config``; explicit
flags win over file values.  Exit codes: 0 on success, 1 when a
tolerance or self-check fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from .order_stats import ServiceDistribution
from .simulator import (
    InsufficientDataError,
    SimConfig,
    simulate_ledger,
    write_ledger_csv,
)
from .sweeps import SweepSpec, sweep_k, sweep_shift
from .validation import CHECK_NAMES, ValidationSettings, run_checks

import numpy as np

__all__ = ["main", "parse_config"]

_DEFAULTS = {
    "dist": "exp",
    "rate": 1.0,
    "shift": 0.0,
    "intervals": 100_000,
    "replications": 8,
    "seed": 1729,
    "tolerance": 0.02,
    "out": None,
    "config": None,
    "k": None,
    "c_values": None,
    "checks": None,
}


def _rate(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"lambda must be a number, got {text!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError(f"lambda must be positive, got {text}")
    return value


def _shift(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"shift must be a number, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"shift must be nonnegative, got {text}")
    return value


def _tolerance(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance must be a number, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"tolerance must be nonnegative, got {text}")
    return value


def _positive_int(name: str):
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer, got {text!r}")
        if value < 1:
            raise argparse.ArgumentTypeError(f"{name} must be positive, got {text}")
        return value

    return parse


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}")
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits, got {text}")
    return value


def _k_values(text: str) -> tuple[int, ...]:
    """Parse --k: a single integer or an inclusive range a..b."""
    text = text.strip()
    if ".." in text:
        lo_text, _, hi_text = text.partition("..")
        try:
            lo, hi = int(lo_text), int(hi_text)
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"k range must be integers a..b, got {text!r}"
            )
        if lo < 1 or hi < lo:
            raise argparse.ArgumentTypeError(
                f"k range must satisfy 1 <= a <= b, got {text!r}"
            )
        return tuple(range(lo, hi + 1))
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"k must be an integer or range a..b, got {text!r}"
        )
    if value < 1:
        raise argparse.ArgumentTypeError(f"k must be positive, got {text}")
    return (value,)


def _c_values(text: str) -> tuple[float, ...]:
    """Parse --c-values: a comma list of nonnegative shifts."""
    try:
        values = tuple(float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"c-values must be a comma list of numbers, got {text!r}"
        )
    if any(v < 0 for v in values):
        raise argparse.ArgumentTypeError(f"c-values must be nonnegative, got {text}")
    return values


def _checks(text: str) -> tuple[str, ...]:
    names = tuple(part.strip() for part in text.split(",") if part.strip())
    unknown = set(names) - set(CHECK_NAMES)
    if unknown:
        raise argparse.ArgumentTypeError(
            f"unknown checks {sorted(unknown)}; available: {', '.join(CHECK_NAMES)}"
        )
    return names


_PARSERS = {
    "dist": lambda text: text,
    "rate": _rate,
    "shift": _shift,
    "k": _k_values,
    "c_values": _c_values,
    "intervals": _positive_int("intervals"),
    "replications": _positive_int("replications"),
    "seed": _seed,
    "out": lambda text: text,
    "tolerance": _tolerance,
    "checks": _checks,
}


def _add_common(parser: argparse.ArgumentParser, *names: str) -> None:
    options = {
        "dist": dict(choices=("exp", "sexp"), help="service law family"),
        "rate": dict(type=_rate, help="exponential rate lambda (> 0)"),
        "shift": dict(type=_shift, help="service-time shift c (>= 0)"),
        "k": dict(type=_k_values, help="priority group size: integer or range a..b"),
        "c_values": dict(type=_c_values, help="comma list of shifts to sweep"),
        "intervals": dict(type=_positive_int("intervals"), help="intervals per replication"),
        "replications": dict(type=_positive_int("replications"), help="independent replications"),
        "seed": dict(type=_seed, help="master seed"),
        "out": dict(help="output CSV path"),
        "tolerance": dict(type=_tolerance, help="max allowed |sim - theory| / theory"),
        "checks": dict(type=_checks, help="comma list of check names (default: all)"),
        "config": dict(help="key=value file; flags override file values"),
    }
    flag_names = {"rate": "--lambda", "c_values": "--c-values"}
    for name in names:
        parser.add_argument(
            flag_names.get(name, f"--{name.replace('_', '-')}"),
            dest=name,
            default=None,
            **options[name],
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agecast",
        description="Average age of information: closed forms vs simulation.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("sweep-k", help="sweep the priority group size")
    _add_common(
        p, "dist", "rate", "shift", "k", "intervals", "replications",
        "seed", "out", "tolerance", "config",
    )

    p = commands.add_parser("sweep-shift", help="sweep the service-time shift")
    _add_common(
        p, "dist", "rate", "k", "c_values", "intervals", "replications",
        "seed", "out", "tolerance", "config",
    )

    p = commands.add_parser("validate", help="run the named self-checks")
    _add_common(
        p, "intervals", "replications", "seed", "tolerance", "checks", "config",
    )

    p = commands.add_parser("ledger", help="dump per-interval draws to CSV")
    _add_common(
        p, "dist", "rate", "shift", "k", "intervals", "seed", "out", "config",
    )
    return parser


def _read_config_file(path: str, parser: argparse.ArgumentParser) -> dict[str, str]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        parser.error(f"config file: {exc}")
    values = {}
    for number, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            parser.error(f"config file line {number}: expected key=value, got {line!r}")
        key, _, text = line.partition("=")
        key = key.strip().replace("-", "_")
        if key == "lambda":
            key = "rate"
        values[key] = text.strip()
    return values


def _merge_options(args: argparse.Namespace, parser: argparse.ArgumentParser) -> dict:
    """Built-in defaults, overridden by config file, overridden by flags."""
    given = {
        name: value
        for name, value in vars(args).items()
        if name != "command" and value is not None
    }
    merged = dict(_DEFAULTS)
    if args.config is not None:
        for key, text in _read_config_file(args.config, parser).items():
            if key not in _PARSERS:
                parser.error(f"config file: unknown key {key!r}")
            try:
                merged[key] = _PARSERS[key](text)
            except argparse.ArgumentTypeError as exc:
                parser.error(f"config file: {exc}")
    merged.update(given)
    if merged["dist"] not in ("exp", "sexp"):
        parser.error(f"dist must be exp or sexp, got {merged['dist']!r}")
    return merged


def _single_k(merged: dict, parser: argparse.ArgumentParser) -> int:
    if merged["k"] is None:
        parser.error("k is required")
    if len(merged["k"]) != 1:
        parser.error(f"k must be a single integer here, got {merged['k']}")
    return merged["k"][0]


@dataclass(frozen=True)
class LedgerRequest:
    dist: ServiceDistribution
    k: int
    num_intervals: int
    seed: int
    out_path: str


@dataclass(frozen=True)
class ValidateRequest:
    settings: ValidationSettings
    names: tuple[str, ...] | None


def _build_request(command, merged, parser):
    if command in ("sweep-k", "sweep-shift"):
        if merged["dist"] == "exp" and merged["shift"] not in (0, 0.0):
            parser.error("shift must be 0 for dist exp; use --dist sexp")
        try:
            if command == "sweep-k":
                if merged["k"] is None:
                    parser.error("k is required")
                return SweepSpec(
                    variable="k",
                    values=merged["k"],
                    rate=merged["rate"],
                    shift=merged["shift"],
                    k=merged["k"][0],
                    num_intervals=merged["intervals"],
                    replications=merged["replications"],
                    seed=merged["seed"],
                    tolerance=merged["tolerance"],
                    out_path=merged["out"],
                )
            if merged["dist"] == "exp":
                parser.error("sweep-shift varies the shift; dist must be sexp")
            if merged["c_values"] is None:
                parser.error("c-values is required")
            return SweepSpec(
                variable="c",
                values=merged["c_values"],
                rate=merged["rate"],
                shift=0.0,
                k=_single_k(merged, parser),
                num_intervals=merged["intervals"],
                replications=merged["replications"],
                seed=merged["seed"],
                tolerance=merged["tolerance"],
                out_path=merged["out"],
            )
        except ValueError as exc:
            parser.error(str(exc))
    if command == "validate":
        return ValidateRequest(
            settings=ValidationSettings(
                seed=merged["seed"],
                num_intervals=merged["intervals"],
                replications=merged["replications"],
                tolerance=merged["tolerance"],
            ),
            names=merged["checks"],
        )
    if merged["out"] is None:
        parser.error("out is required for ledger dumps")
    try:
        dist = ServiceDistribution(rate=merged["rate"], shift=merged["shift"])
    except ValueError as exc:
        parser.error(str(exc))
    return LedgerRequest(
        dist=dist,
        k=_single_k(merged, parser),
        num_intervals=merged["intervals"],
        seed=merged["seed"],
        out_path=merged["out"],
    )


def parse_config(argv=None):
    """Parse flags plus optional config file into one request object.

    Returns ``(command, request)`` where the request is a SweepSpec,
    ValidateRequest or LedgerRequest.  Usage problems exit with code 2
    and a message naming the offending field.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    merged = _merge_options(args, parser)
    return args.command, _build_request(args.command, merged, parser)


def _print_report(report, out_path) -> None:
    label = report.variable
    for row in report.rows:
        bound = "" if row.lower_bound is None else f"  bound={row.lower_bound:.6f}"
        print(
            f"{label}={row.sweep_value:g}"
            f"  delta_p={row.delta_p_theory:.6f} (sim {row.delta_p_sim:.6f}"
            f" +- {row.delta_p_stderr:.6f})"
            f"  delta_e={row.delta_e_theory:.6f} (sim {row.delta_e_sim:.6f}"
            f" +- {row.delta_e_stderr:.6f}){bound}"
        )
    print(f"max relative error {report.max_relerr():.6f} (tolerance {report.tolerance:g})")
    if out_path is not None:
        print(f"wrote {out_path}")


def _run_sweep(command: str, spec: SweepSpec) -> int:
    try:
        report = sweep_k(spec) if command == "sweep-k" else sweep_shift(spec)
    except OSError as exc:
        print(f"agecast: cannot write output: {exc}", file=sys.stderr)
        return 2
    except InsufficientDataError as exc:
        print(f"agecast: {exc}", file=sys.stderr)
        return 2
    _print_report(report, spec.out_path)
    if not report.within_tolerance():
        print("tolerance exceeded", file=sys.stderr)
        return 1
    return 0


def _run_validate(request: ValidateRequest) -> int:
    results = run_checks(request.settings, request.names)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name:<{width}}  {r.detail}")
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


def _run_ledger(request: LedgerRequest) -> int:
    rng = np.random.default_rng(np.random.SeedSequence(request.seed))
    ledger = simulate_ledger(request.dist, request.k, request.num_intervals, rng)
    try:
        write_ledger_csv(ledger, request.out_path)
    except OSError as exc:
        print(f"agecast: cannot write output: {exc}", file=sys.stderr)
        return 2
    print(
        f"wrote {request.out_path}: {ledger.num_intervals} intervals, "
        f"{int(ledger.delivered.sum())} deliveries"
    )
    return 0


def main(argv=None) -> int:
    command, request = parse_config(argv)
    if command in ("sweep-k", "sweep-shift"):
        return _run_sweep(command, request)
    if command == "validate":
        return _run_validate(request)
    return _run_ledger(request)


if __name__ == "__main__":
    sys.exit(main())
