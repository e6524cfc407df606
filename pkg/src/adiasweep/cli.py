"""Command-line interface.

Subcommands:

    sweep          run a t-grid sweep and write CSV or JSON records
    estimate       print the switching-estimate table for a model
    schedule-dump  write (s, value, deriv1) samples of a pulse family
    check          run the acceptance suite

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

from . import acceptance
from .config import (
    ConfigError,
    merge_settings,
    model_spec_from_settings,
    parse_config_file,
    sweep_config_from_settings,
)
from .evolution import EvolutionFailure
from .hamiltonians import MODEL_NAMES, build
from .metrics import DegenerateGapError, reference_scaling_estimate, switching_estimate
from .schedules import ExponentialPulse, Parabola, PowerRamp, rational_pulse
from .sweep import emit_csv, emit_json, load_or_run

DEFAULT_CACHE_DIR = ".adiasweep-cache"


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", choices=MODEL_NAMES, help="builtin model name")
    parser.add_argument("--k", type=float, help="endpoint smoothing scale")
    parser.add_argument("--k1", type=float, help="per-coupling smoothing override")
    parser.add_argument("--k2", type=float, help="per-coupling smoothing override")
    parser.add_argument("--k3", type=float, help="per-coupling smoothing override")
    parser.add_argument("--n", type=int, dest="n", help="smoothing order (default 1)")
    for name in ("E0", "E1", "E2", "E3"):
        parser.add_argument(f"--{name}", type=float, help=f"energy parameter {name}")
    parser.add_argument(
        "--prefactor",
        choices=("midpoint-normalized", "as-printed"),
        help="normalization of the smoothed pulse (default midpoint-normalized)",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adiasweep",
        description="Adiabatic state-preparation error scaling: sweeps and estimates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run a total-time sweep")
    sweep.add_argument("--config", help="flat key=value config file")
    _add_model_flags(sweep)
    sweep.add_argument("--tmin", type=float, dest="t_min")
    sweep.add_argument("--tmax", type=float, dest="t_max")
    sweep.add_argument("--ppd", type=int, dest="points_per_decade", help="grid points per decade")
    sweep.add_argument("--tau0", type=float, help="averaging window scale")
    sweep.add_argument("--samples", type=int, help="window samples per grid point")
    sweep.add_argument("--reduction", choices=("rms", "mean"), help="window reduction")
    sweep.add_argument("--rtol", type=float)
    sweep.add_argument("--atol", type=float)
    sweep.add_argument("--s-start", type=float, dest="s_start")
    sweep.add_argument("--s-end", type=float, dest="s_end")
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--out", help="output file path (default sweep.csv)")
    sweep.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    sweep.add_argument("--cache-dir", dest="cache_dir")
    sweep.add_argument("--no-cache", action="store_true", default=None, dest="no_cache")

    est = sub.add_parser("estimate", help="print the switching-estimate table")
    est.add_argument("--config", help="flat key=value config file")
    _add_model_flags(est)
    est.add_argument("--orders", default="1,2", help="comma-separated estimate orders")

    dump = sub.add_parser("schedule-dump", help="write (s, value, deriv1) samples")
    dump.add_argument(
        "--family",
        choices=("parabola", "rational", "exponential", "ramp"),
        default="rational",
    )
    dump.add_argument("--k", type=float, default=1e-3)
    dump.add_argument("--n", type=int, default=1)
    dump.add_argument(
        "--prefactor",
        choices=("midpoint-normalized", "as-printed"),
        default="midpoint-normalized",
    )
    dump.add_argument("--points", type=int, default=501)
    dump.add_argument("--out", default="schedule.csv")

    check = sub.add_parser("check", help="run the acceptance suite")
    check.add_argument("--only", help="comma-separated criterion numbers (default all)")
    check.add_argument("--cache-dir", dest="cache_dir", default=DEFAULT_CACHE_DIR)
    check.add_argument("--no-cache", action="store_true")

    return parser


def _collect_overrides(args: argparse.Namespace) -> dict:
    keys = (
        "model", "k", "k1", "k2", "k3", "n", "E0", "E1", "E2", "E3", "prefactor",
        "t_min", "t_max", "points_per_decade", "tau0", "samples", "reduction",
        "rtol", "atol", "s_start", "s_end", "workers", "out", "format",
        "cache_dir", "no_cache",
    )
    return {k: getattr(args, k) for k in keys if hasattr(args, k)}


def _cmd_sweep(args: argparse.Namespace) -> int:
    file_values = parse_config_file(args.config) if args.config else {}
    settings = merge_settings(file_values, _collect_overrides(args))
    cfg = sweep_config_from_settings(settings)
    out_path = str(settings.get("out", "sweep.csv"))
    out_format = str(settings.get("format", "csv"))
    cache_dir = str(settings.get("cache_dir", DEFAULT_CACHE_DIR))
    use_cache = not bool(settings.get("no_cache", False))
    records = load_or_run(cfg, cache_dir, use_cache)
    if out_format == "json":
        emit_json(records, cfg, out_path)
    else:
        emit_csv(records, out_path)
    failed = [r for r in records if not r.ok]
    print(f"wrote {len(records)} records to {out_path} ({len(failed)} failed points)")
    return 2 if failed else 0


def _cmd_estimate(args: argparse.Namespace) -> int:
    file_values = parse_config_file(args.config) if args.config else {}
    settings = merge_settings(file_values, _collect_overrides(args))
    spec = model_spec_from_settings(settings)
    orders = tuple(int(p) for p in str(args.orders).split(",") if p.strip())
    path = build(spec)
    print(f"model={spec.model} k={spec.k:g} order={spec.order} energies={spec.energy_values()}")
    print(f"{'n':>3} {'b_n(start)':>14} {'b_n(end)':>14} {'b_n':>14}")
    for order in orders:
        est = switching_estimate(path, order)
        print(
            f"{order:>3} {est.start_coefficient:>14.6e} {est.end_coefficient:>14.6e} "
            f"{est.coefficient:>14.6e}"
        )
    if spec.k > 0.0 and spec.model != "two-level-exp":
        ref = reference_scaling_estimate(build(spec.base()), spec.k, spec.order)
        measured = switching_estimate(path, ref.error_order).coefficient
        print(
            f"approximate order-{ref.error_order} reference: "
            f"sqrt-prefactor {ref.sqrt_prefactor_coefficient:.6e}, "
            f"substituted {ref.substituted_coefficient:.6e} "
            f"(exact/substituted = {measured / ref.substituted_coefficient:.6f})"
        )
    return 0


def _cmd_schedule_dump(args: argparse.Namespace) -> int:
    if args.family == "parabola":
        sched = Parabola()
    elif args.family == "rational":
        sched = rational_pulse(args.k, args.n, args.prefactor)
    elif args.family == "exponential":
        sched = ExponentialPulse(args.k) if args.k > 0.0 else Parabola()
    else:
        sched = PowerRamp(args.k, args.n) if args.k > 0.0 else Parabola()
    if args.points < 2:
        raise ConfigError("need at least 2 sample points")
    lines = ["s,value,deriv1"]
    for i in range(args.points):
        s = i / (args.points - 1)
        lines.append(f"{s!r},{sched.value(s)!r},{sched.deriv1(s)!r}")
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {args.points} samples to {args.out}")
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    numbers = None
    if args.only:
        numbers = tuple(int(p) for p in args.only.split(",") if p.strip())
        unknown = [n for n in numbers if n not in acceptance.CRITERIA]
        if unknown:
            raise ConfigError(f"unknown criterion numbers {unknown}")
    results = acceptance.run_all(
        cache_dir=args.cache_dir, use_cache=not args.no_cache, numbers=numbers
    )
    return 0 if all(r.passed for r in results) else 2


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "sweep": _cmd_sweep,
        "estimate": _cmd_estimate,
        "schedule-dump": _cmd_schedule_dump,
        "check": _cmd_check,
    }
    try:
        return handlers[args.command](args)
    except (EvolutionFailure, DegenerateGapError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
