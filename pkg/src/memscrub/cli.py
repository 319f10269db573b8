"""Command-line front end.

Subcommands: ``reliability``, ``mttf``, ``table``, ``simulate``. Output is CSV
or JSON on stdout (or ``--out``); every record embeds the schema version and
the fully resolved parameters. Exit status: 0 on success (deviation reports
included), 1 on usage or configuration errors, 2 on numerical failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import tables
from .markov_kernel import word_log_reliability, chain_for, transient_roots
from .montecarlo import Level, SimConfig, simulate_system_mttf, simulate_word
from .numerics import QuadratureError, safe_complement
from .params import (
    ConfigError,
    Model,
    ScrubConfig,
    canonicalize,
    sec_ded_check_bits,
    words_from_megabytes,
)
from .scrub_models import (
    MttfMethod,
    MttfResult,
    NumericalFailure,
    configure,
    mttf_bounds,
    mttf_probabilistic_closed,
    mttf_quadrature_probabilistic,
    mttf_renewal_exact,
    system_log_reliability,
    word_log_curve,
)

SCHEMA_VERSION = "1.0"
FORMAT_ENV = "MEMSCRUB_FORMAT"
EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2

METHODS_BY_MODEL = {
    Model.PROBABILISTIC: ("closed", "quadrature"),
    Model.DETERMINISTIC: ("renewal", "bounds"),
    Model.MIXED: ("renewal", "bounds"),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- output


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _jsonable(value):
    """Plain JSON values; non-finite floats become strings such as ``"inf"``."""
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def render(record: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_jsonable(record), indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    buf.write(f"# schema_version: {record['schema_version']}\n")
    buf.write(f"# command: {record['command']}\n")
    for key, value in record["parameters"].items():
        buf.write(f"# {key}: {json.dumps(_jsonable(value), allow_nan=False)}\n")
    for note in record.get("notes", []):
        buf.write(f"# note: {note}\n")
    rows = record["rows"]
    if rows:
        columns = list(dict.fromkeys(k for row in rows for k in row))
        buf.write(",".join(columns) + "\n")
        for row in rows:
            buf.write(",".join(_fmt(row.get(c)) for c in columns) + "\n")
    return buf.getvalue()


def _record(command: str, parameters: dict, rows: list[dict], notes: Sequence[str] = ()) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "parameters": parameters,
        "rows": rows,
        "notes": list(notes),
    }


def _emit(args, record: dict) -> None:
    text = render(record, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- config


def read_config_file(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


_CONFIG_TYPES = {
    "lambda_": float,
    "data_bits": int,
    "check_bits": int,
    "words": int,
    "megabytes": int,
    "period_seconds": float,
    "rate_per_second": float,
    "model": lambda v: [v.strip().lower()],
}


def _apply_config_file(args) -> None:
    if not getattr(args, "config", None):
        return
    values = read_config_file(args.config)
    for key, value in values.items():
        dest = "lambda_" if key in ("lambda", "lambda_per_bit_day") else key
        if dest not in _CONFIG_TYPES:
            raise UsageError(f"unknown configuration key {key!r}")
        if getattr(args, dest) is None:
            cast = _CONFIG_TYPES[dest]
            try:
                setattr(args, dest, cast(value))
            except ValueError:
                raise UsageError(f"bad value for {key}: {value!r}") from None


def _system_from_args(args, model: Model) -> ScrubConfig:
    lam = 1e-5 if args.lambda_ is None else args.lambda_
    w = 32 if args.data_bits is None else args.data_bits
    c = sec_ded_check_bits(w) if args.check_bits is None else args.check_bits
    if args.words is not None and args.megabytes is not None:
        raise UsageError("give either --words or --megabytes, not both")
    if args.words is not None:
        words = args.words
    else:
        words = words_from_megabytes(1 if args.megabytes is None else args.megabytes, w)
    period = 10.0 if args.period_seconds is None else args.period_seconds
    rate = 0.1 if args.rate_per_second is None else args.rate_per_second
    return ScrubConfig(
        lambda_per_bit_day=lam,
        data_bits=w,
        check_bits=c,
        memory_words=words,
        scrub_period_seconds=period if model.uses_sweep else None,
        scrub_rate_per_second=rate if model.uses_access_scrub else None,
        model=model,
    )


def resolved_parameters(config: ScrubConfig) -> dict:
    rates = canonicalize(config)
    return {
        "model": config.model.value,
        "lambda_per_bit_day": config.lambda_per_bit_day,
        "data_bits": config.data_bits,
        "check_bits": config.check_bits,
        "memory_words": config.memory_words,
        "scrub_period_seconds": config.scrub_period_seconds,
        "scrub_rate_per_second": config.scrub_rate_per_second,
        "lambda_day": rates.lambda_day,
        "mu_day": rates.mu_day,
        "period_days": rates.period_days,
        "total_bits_n": rates.total_bits_n,
    }


def _models(args) -> list[Model]:
    names = args.model or ["probabilistic"]
    if "all" in names:
        return [Model.PROBABILISTIC, Model.DETERMINISTIC, Model.MIXED]
    return list(dict.fromkeys(Model.parse(n) for n in names))


# ---------------------------------------------------------------- commands


def _time_grid(args) -> np.ndarray:
    if not args.t_max > 0:
        raise UsageError("--t-max must be positive")
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    if args.grid == "log":
        t_min = args.t_min if args.t_min is not None else args.t_max * 1e-6
        if not 0 < t_min < args.t_max:
            raise UsageError("--t-min must lie in (0, t-max)")
        return np.concatenate([[0.0], np.geomspace(t_min, args.t_max, args.points - 1)])
    return np.linspace(0.0, args.t_max, args.points)


def cmd_reliability(args) -> dict:
    grid = _time_grid(args)
    rows, params = [], {}
    for model in _models(args):
        config = _system_from_args(args, model)
        params[model.value] = resolved_parameters(config)
        series = [(model.value, word_log_curve(config, grid))]
        if args.kernel:
            kernel = word_log_reliability(transient_roots(chain_for(config)), grid)
            series.append((f"{model.value}-kernel", kernel))
        for name, log_r in series:
            log_R = np.atleast_1d(system_log_reliability(log_r, config.memory_words))
            for t, lr in zip(grid, log_R):
                rows.append({
                    "model": name,
                    "t_days": float(t),
                    "log_R": float(lr),
                    "R": math.exp(lr),
                    "F_sys": float(safe_complement(lr)),
                })
    return _record("reliability", params, rows)


def _mttf_row(config: ScrubConfig, result: MttfResult) -> dict:
    return {
        "model": config.model.value,
        "scrub_period_seconds": config.scrub_period_seconds,
        "scrub_rate_per_second": config.scrub_rate_per_second,
        "method": result.method.value,
        "point_days": result.point,
        "lower_days": result.lower,
        "upper_days": result.upper,
    }


def _mttf_results(config: ScrubConfig, method: str, tol: float) -> list[MttfResult]:
    valid = METHODS_BY_MODEL[config.model]
    if method == "all":
        chosen = valid
    elif method in valid:
        chosen = (method,)
    else:
        raise UsageError(
            f"method {method!r} does not apply to {config.model.value} scrubbing; valid: {', '.join(valid)}, all"
        )
    out = []
    for name in chosen:
        if name == "closed":
            out.append(mttf_probabilistic_closed(config, MttfMethod.CLOSED_FORM_EQ8))
            out.append(mttf_probabilistic_closed(config, MttfMethod.CLOSED_FORM_TABLE2))
        elif name == "quadrature":
            out.append(mttf_quadrature_probabilistic(config, tol))
        elif name == "renewal":
            out.append(mttf_renewal_exact(config, tol))
        elif name == "bounds":
            out.append(mttf_bounds(config))
    return out


def cmd_mttf(args) -> dict:
    rows, params = [], {}
    periods = [None]
    if args.sweep_period_seconds:
        start, stop, count = args.sweep_period_seconds
        if not (0 < start < stop) or int(count) < 2:
            raise UsageError("--sweep-period-seconds needs 0 < START < STOP and COUNT >= 2")
        periods = [float(p) for p in np.geomspace(start, stop, int(count))]
    for model in _models(args):
        base = _system_from_args(args, model)
        params[model.value] = resolved_parameters(base)
        configs = [base]
        if periods[0] is not None and model.uses_sweep:
            configs = [configure(base, model, scrub_period_seconds=p) for p in periods]
        for config in configs:
            for result in _mttf_results(config, args.method, args.tol):
                rows.append(_mttf_row(config, result))
    return _record("mttf", params, rows)


def cmd_table(args) -> dict:
    params, rows = tables.regenerate(args.paper, args.variant)
    params = {"table": args.paper, "title": tables.TABLE_TITLES[args.paper], "variant": args.variant, **params}
    notes = [
        "MTTF in days; 1 MB = 2**20 bytes of data; '.' is the decimal separator",
        "ratio = computed / printed; deviations are reported, not errors",
    ]
    if args.paper in tables.LADDER_TABLES and tables.LADDER_TABLES[args.paper].corrections:
        notes.append("ratio_corrected divides by the misprint-corrected value where one is listed")
    return _record("table", params, rows, notes)


def cmd_simulate(args) -> dict:
    model = _models(args)[0]
    system = _system_from_args(args, model)
    sim = SimConfig(
        system=system,
        trials=args.trials,
        horizon=args.horizon_days,
        seed=args.seed,
        level=Level(args.level),
        workers=args.workers,
    )
    params = {
        "system": resolved_parameters(system),
        "trials": sim.trials,
        "horizon_days": sim.horizon,
        "seed": sim.seed,
        "level": sim.level.value,
    }
    if args.system_words:
        result = simulate_system_mttf(sim, args.system_words)
        row = {
            "memory_words": args.system_words,
            "mttf_days": result.point,
            "std_error_days": result.std_error,
            "lower_days": result.lower,
            "upper_days": result.upper,
        }
        if args.compare:
            analytic = configure(system, model, memory_words=args.system_words)
            value = mttf_renewal_exact(analytic).point if model.uses_sweep else mttf_quadrature_probabilistic(analytic).point
            row["analytic_days"] = value
            row["z"] = (result.point - value) / result.std_error
        return _record("simulate", params, [row])

    times = np.linspace(0.0, sim.horizon, args.checkpoints + 1)[1:]
    est = simulate_word(sim, times)
    rows = []
    analytic = np.exp(word_log_curve(system, times)) if args.compare else None
    for i, t in enumerate(est.times):
        row = {
            "t_days": float(t),
            "survival": float(est.survival[i]),
            "ci_halfwidth": float(est.ci_halfwidth[i]),
        }
        if analytic is not None:
            row["analytic"] = float(analytic[i])
            sigma = est.ci_halfwidth[i] / 3.0
            row["z"] = float((est.survival[i] - analytic[i]) / sigma) if sigma > 0 else None
        rows.append(row)
    notes = [f"warning: {est.warning}"] if est.warning else []
    params["failures"] = est.failures
    return _record("simulate", params, rows, notes)


# ---------------------------------------------------------------- parser


def _system_flags(p: argparse.ArgumentParser, multi_model: bool = True) -> None:
    g = p.add_argument_group("system")
    g.add_argument("--config", help="flat key=value file supplying defaults for these flags")
    g.add_argument("--model", action="append", choices=["probabilistic", "deterministic", "mixed", "all"],
                   help="scrubbing model (repeatable)" if multi_model else "scrubbing model")
    g.add_argument("--lambda", dest="lambda_", type=float, help="upsets per bit per day [1e-5]")
    g.add_argument("--data-bits", type=int, help="data bits per word [32]")
    g.add_argument("--check-bits", type=int, help="check bits per word [SEC-DED minimum]")
    g.add_argument("--words", type=int, help="memory size in words")
    g.add_argument("--megabytes", type=int, help="memory size in MB of data, 1 MB = 2**20 bytes [1]")
    g.add_argument("--period-seconds", type=float, help="sweep period T in seconds [10]")
    g.add_argument("--rate-per-second", type=float, help="access scrub rate mu per second [0.1]")


def _output_flags(p: argparse.ArgumentParser) -> None:
    default = os.environ.get(FORMAT_ENV, "csv")
    if default not in ("csv", "json"):
        default = "csv"
    p.add_argument("--format", choices=["csv", "json"], default=default)
    p.add_argument("--out", help="write to this path instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="memscrub", description="Reliability and MTTF of scrubbed SEC-DED memories.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("reliability", help="system reliability curves R(t)")
    _system_flags(p)
    p.add_argument("--t-max", type=float, default=3000.0, help="last time point, days")
    p.add_argument("--t-min", type=float, help="first non-zero time point for --grid log, days")
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--grid", choices=["linear", "log"], default="linear")
    p.add_argument("--kernel", action="store_true", help="also emit the unswept single-interval curve")
    _output_flags(p)
    p.set_defaults(func=cmd_reliability)

    p = sub.add_parser("mttf", help="MTTF by one or all methods")
    _system_flags(p)
    p.add_argument("--method", choices=["closed", "quadrature", "renewal", "bounds", "all"], default="all")
    p.add_argument("--tol", type=float, default=1e-9, help="relative quadrature tolerance")
    p.add_argument("--sweep-period-seconds", nargs=3, type=float, metavar=("START", "STOP", "COUNT"),
                   help="log-spaced sweep over T for deterministic/mixed models")
    _output_flags(p)
    p.set_defaults(func=cmd_mttf)

    p = sub.add_parser("table", help="regenerate a published table with a deviations report")
    p.add_argument("--paper", type=int, required=True, choices=range(1, 8), metavar="{1..7}",
                   help="1-4 MTTF ladders, 5 ratios, 6 T/mu sensitivity, 7 daily-sweep comparison")
    p.add_argument("--variant", choices=["title", "caption"], default="title",
                   help="table 4 word size: 64 bits (title) or 34 bits (caption)")
    _output_flags(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("simulate", help="Monte Carlo survival or system MTTF")
    _system_flags(p, multi_model=False)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--level", choices=[lv.value for lv in Level], default="state")
    p.add_argument("--horizon-days", type=float, default=600.0)
    p.add_argument("--checkpoints", type=int, default=5)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--system-words", type=int, help="estimate MTTF of this many words instead of survival")
    p.add_argument("--compare", action="store_true", help="add analytic values and z-scores")
    _output_flags(p)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args)
        record = args.func(args)
    except (UsageError, ConfigError, ValueError, OSError) as exc:
        print(f"memscrub: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalFailure, QuadratureError) as exc:
        print(f"memscrub: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _emit(args, record)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
