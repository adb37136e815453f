"""Batch driver: config parsing, parallel sweeps over n, presets, emission.

Results are deterministic for a given config: worker counts and scheduling
change nothing in the output bytes. Numbers are serialized as scientific
strings at the configured number of significant digits (an exponent of zero
is implied when absent); progress and warnings go to standard error only.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import mp, mpf

from .diagnostics import apriori_bounds, convergence_report
from .errors import ConfigError, DivergenceError, IoError, SolverError
from .fd_polynomial import PolynomialPotential, run
from .fd_stepwise import build_overlap_matrix, run_general
from .jacobi_basis import OperatorParams
from .numerics import PrecisionContext

RESULT_FIELDS = ("n", "r_n", "lambda_rank_m", "eig_bound", "fun_bound",
                 "corrections", "norms")
DIAG_FIELDS = ("n", "M_n", "r_n", "eig_bound", "fun_bound")

DEFAULTS = {
    "n": "0",
    "rank": "20",
    "digits": "50",
    "workers": "1",
    "normalization": None,  # resolved to leading-one for stepwise runs
    "format": "csv",
    "out": None,
    "overlap_method": None,  # resolved to exact for the step potential
}

# Reference configurations; normalization is leading-one so the emitted norm
# columns line up with the reference tables directly.
PRESETS = {
    "example1": {
        "alpha": "1/2", "beta": "0", "s": "3/4", "poly": "0,0,0,1/4",
        "n": "0,1,2,3,4,10", "rank": "20", "digits": "50",
        "normalization": "leading-one",
    },
    "example2": {
        "alpha": "-1/8", "beta": "-1/2", "s": "3/4",
        "poly": "1/12,1/12,1/12,1/12",
        "n": "0,1,2,3,4,10", "rank": "30", "digits": "50",
        "normalization": "leading-one",
    },
    "example3": {
        "alpha": "0", "beta": "0", "s": "3/4", "step": True,
        "n": "0", "rank": "16", "trunc": "64", "digits": "32",
        "overlap_method": "closed-form",
    },
}


@dataclass(frozen=True)
class JobConfig:
    """Validated batch description; picklable so workers can carry it."""

    params: OperatorParams
    potential: object  # PolynomialPotential | "step" | overlap file path
    n_set: tuple[int, ...]
    rank: int
    trunc: int | None
    precision: PrecisionContext
    normalization: str = "normalized"
    workers: int = 1
    fmt: str = "csv"
    out: str | None = None
    overlap_method: str = "exact"


@dataclass(frozen=True)
class ResultRow:
    """One eigenpair row, serialization-ready. Wall time never hits the file."""

    n: int
    r_n: str | None
    lambda_rank_m: str
    eig_bound: str | None
    fun_bound: str | None
    corrections: tuple[str, ...]
    norms: tuple[str, ...]
    wall_time: float | None = field(default=None, compare=False)


@dataclass(frozen=True)
class DiagnosticsRow:
    n: int
    M_n: str
    r_n: str
    eig_bound: str | None
    fun_bound: str | None


def _fmt(x, ctx: PrecisionContext) -> str:
    with ctx.workdps():
        return mp.nstr(x, ctx.digits, min_fixed=0, max_fixed=0)


def _is_overlap_file(potential) -> bool:
    return isinstance(potential, str) and potential != "step"


def _to_int(key: str, value, minimum: int | None = None) -> int:
    try:
        out = int(str(value))
    except ValueError:
        raise ConfigError(f"{key}: not an integer: {value!r}") from None
    if minimum is not None and out < minimum:
        raise ConfigError(f"{key}: must be >= {minimum}, got {out}")
    return out


def _to_fraction(key: str, value) -> Fraction:
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{key}: not a rational number: {value!r}") from None


def _context_for(digits: int) -> PrecisionContext:
    try:
        return PrecisionContext(digits=digits, verify_digits=max(100, 2 * digits))
    except ValueError as exc:
        raise ConfigError(f"digits: {exc}") from None


def _config_from_mapping(m: dict) -> JobConfig:
    def need(key):
        v = m.get(key)
        if v in (None, ""):
            raise ConfigError(f"{key}: required")
        return v

    try:
        params = OperatorParams(_to_fraction("alpha", need("alpha")),
                                _to_fraction("beta", need("beta")),
                                _to_fraction("s", need("s")))
    except (ValueError, SolverError) as exc:
        raise ConfigError(str(exc)) from None

    chosen = [k for k in ("poly", "step", "overlap") if m.get(k)]
    if len(chosen) != 1:
        raise ConfigError("potential: exactly one of poly/step/overlap is required")
    kind = chosen[0]
    if kind == "poly":
        try:
            potential = PolynomialPotential.from_spec(str(m["poly"]))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"poly: {exc}") from None
    elif kind == "step":
        potential = "step"
    else:
        potential = str(m["overlap"])
    stepwise = not isinstance(potential, PolynomialPotential)

    try:
        n_set = tuple(sorted({int(tok) for tok in str(need("n")).split(",") if tok.strip() != ""}))
    except ValueError:
        raise ConfigError(f"n: not a comma-separated list of integers: {m.get('n')!r}") from None
    if not n_set:
        raise ConfigError("n: at least one index is required")
    if n_set[0] < 0:
        raise ConfigError("n: indices must be nonnegative")

    rank = _to_int("rank", need("rank"), minimum=0)

    trunc = None
    if m.get("trunc") not in (None, ""):
        trunc = _to_int("trunc", m["trunc"], minimum=1)
    if stepwise:
        if trunc is None:
            raise ConfigError("trunc: required for step/overlap potentials")
        if trunc < n_set[-1] + 1:
            raise ConfigError(f"trunc: must be >= max(n)+1 = {n_set[-1] + 1}")
        if params.alpha != 0 or params.beta != 0:
            raise ConfigError("alpha/beta: step/overlap potentials need alpha = beta = 0")
    elif trunc is not None:
        raise ConfigError("trunc: only meaningful for step/overlap potentials")

    normalization = m.get("normalization")
    if normalization is None:
        normalization = "leading-one" if stepwise else "normalized"
    if normalization not in ("normalized", "leading-one"):
        raise ConfigError(f"normalization: unknown value {normalization!r}")
    if stepwise and normalization != "leading-one":
        raise ConfigError("normalization: the truncated general recursion fixes "
                          "the leading coefficient (use leading-one)")

    overlap_method = m.get("overlap_method")
    if overlap_method is None:
        overlap_method = "exact"
    elif potential != "step":
        raise ConfigError("overlap_method: only meaningful for the step potential")
    if overlap_method not in ("exact", "closed-form"):
        raise ConfigError(f"overlap_method: unknown value {overlap_method!r}")

    fmt = m.get("format") or "csv"
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format: unknown value {fmt!r}")

    return JobConfig(
        params=params, potential=potential, n_set=n_set, rank=rank, trunc=trunc,
        precision=_context_for(_to_int("digits", need("digits"), minimum=1)),
        normalization=normalization,
        workers=_to_int("workers", m.get("workers") or "1", minimum=1),
        fmt=fmt, out=m.get("out") or None, overlap_method=overlap_method,
    )


_CONFIG_KEYS = ("alpha", "beta", "s", "poly", "step", "overlap", "n", "rank",
                "trunc", "digits", "workers", "normalization", "format", "out",
                "overlap_method")


def _read_config_file(path: str) -> dict:
    out: dict = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"config: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if "=" not in text:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, _, value = text.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key == "step":
            if value.lower() not in ("true", "false", "1", "0"):
                raise ConfigError(f"{path}:{lineno}: step must be true/false")
            out[key] = value.lower() in ("true", "1")
        else:
            out[key] = value
    return out


def config_mapping(cfg: JobConfig, include_runtime: bool = True) -> dict:
    """Flat key=value view of a config; inverse of _config_from_mapping."""
    m: dict = {
        "alpha": str(cfg.params.alpha),
        "beta": str(cfg.params.beta),
        "s": str(cfg.params.s),
    }
    if isinstance(cfg.potential, PolynomialPotential):
        m["poly"] = ",".join(str(c) for c in cfg.potential.coeffs)
    elif cfg.potential == "step":
        m["step"] = True
        m["overlap_method"] = cfg.overlap_method
    else:
        m["overlap"] = cfg.potential
    m["n"] = ",".join(str(n) for n in cfg.n_set)
    m["rank"] = str(cfg.rank)
    if cfg.trunc is not None:
        m["trunc"] = str(cfg.trunc)
    m["digits"] = str(cfg.precision.digits)
    m["normalization"] = cfg.normalization
    if include_runtime:
        m["workers"] = str(cfg.workers)
        m["format"] = cfg.fmt
        if cfg.out is not None:
            m["out"] = cfg.out
    return m


def emit_config(cfg: JobConfig) -> str:
    """Config serialized in the flat key=value file format."""
    lines = [f"{k}={str(v).lower() if isinstance(v, bool) else v}"
             for k, v in config_mapping(cfg).items()]
    return "\n".join(lines) + "\n"


def _add_common_flags(p: argparse.ArgumentParser, with_solver: bool) -> None:
    p.add_argument("--config", help="flat key=value config file; flags override")
    p.add_argument("--alpha", help="first exponent of the operator (rational)")
    p.add_argument("--beta", help="second exponent of the operator (rational)")
    p.add_argument("--s", help="fractional order in (0,1) (rational)")
    pot = p.add_mutually_exclusive_group()
    pot.add_argument("--poly", help='polynomial potential "c0,c1,...,cr" (rationals)')
    pot.add_argument("--step", action="store_true", default=None,
                     help="builtin step potential (indicator of (0,1])")
    if with_solver:
        pot.add_argument("--overlap", help="path to an overlap-integral file")
    p.add_argument("--n", help='eigenpair indices "0,1,2,10"')
    p.add_argument("--rank", help="series rank m")
    p.add_argument("--digits", help="working precision in significant digits")
    p.add_argument("--format", choices=["csv", "json"], default=None)
    p.add_argument("--out", help="output path (default: stdout)")
    if with_solver:
        p.add_argument("--trunc", help="basis truncation N (step/overlap only)")
        p.add_argument("--workers", help="parallel workers over n")
        p.add_argument("--normalization", choices=["normalized", "leading-one"],
                       default=None)
        p.add_argument("--overlap-method", dest="overlap_method",
                       choices=["exact", "closed-form"], default=None,
                       help="step-overlap route (default exact)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdjacobi",
        description="Perturbation-series eigensolver for fractional "
                    "Jacobi-type Sturm-Liouville operators.")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common_flags(sub.add_parser("solve", help="compute eigenpair approximations"),
                      with_solver=True)
    _add_common_flags(sub.add_parser("diagnostics",
                                     help="emit gap factors, ratios and bounds"),
                      with_solver=False)
    pre = sub.add_parser("preset", help="run a packaged reference configuration")
    pre.add_argument("name", choices=sorted(PRESETS))
    for flag in ("--n", "--rank", "--digits", "--workers", "--out"):
        pre.add_argument(flag)
    pre.add_argument("--format", choices=["csv", "json"], default=None)
    pre.add_argument("--normalization", choices=["normalized", "leading-one"],
                     default=None)
    return parser


def parse_config(argv=None) -> tuple[str, JobConfig]:
    """Parse flags (and an optional config file) into a validated JobConfig."""
    ns = _build_parser().parse_args(argv)
    if ns.command == "preset":
        mapping = dict(DEFAULTS)
        mapping.update(PRESETS[ns.name])
        for key in ("n", "rank", "digits", "workers", "out", "format", "normalization"):
            value = getattr(ns, key)
            if value is not None:
                mapping[key] = value
        return "solve", _config_from_mapping(mapping)

    mapping = dict(DEFAULTS)
    if ns.config:
        mapping.update(_read_config_file(ns.config))
    for key in _CONFIG_KEYS:
        value = getattr(ns, key, None)
        if value is not None:
            mapping[key] = value
    if ns.command == "diagnostics":
        mapping.setdefault("trunc", None)
        mapping["workers"] = "1"
        if mapping.get("overlap"):
            raise ConfigError("diagnostics: potential sup norm is undefined for "
                              "overlap files (use --poly or --step)")
        if mapping.get("step"):
            mapping["trunc"] = str(max(64, 2 * _max_index(mapping)))
    return ns.command, _config_from_mapping(mapping)


def _max_index(mapping: dict) -> int:
    try:
        return max(int(tok) for tok in str(mapping.get("n", "0")).split(","))
    except ValueError:
        return 0


def _solve_one(payload: tuple[JobConfig, int]) -> ResultRow:
    cfg, n = payload
    ctx = cfg.precision
    t0 = time.perf_counter()
    if isinstance(cfg.potential, PolynomialPotential):
        approx = run(n, cfg.rank, cfg.params, cfg.potential, ctx,
                     normalization=cfg.normalization)
    else:
        B = build_overlap_matrix(cfg.potential, cfg.trunc, ctx,
                                 method=cfg.overlap_method)
        approx = run_general(n, cfg.rank, cfg.trunc, B, cfg.params, ctx,
                             check_truncation=False)
    r_s = eig_s = fun_s = None
    if not _is_overlap_file(cfg.potential):
        report = convergence_report(n, cfg.params, cfg.potential, ctx)
        r_s = _fmt(report.r_n, ctx)
        if report.converges and cfg.rank >= 1:
            try:
                eig_b, fun_b = apriori_bounds(cfg.rank, report.r_n, report.q_inf, ctx)
                eig_s, fun_s = _fmt(eig_b, ctx), _fmt(fun_b, ctx)
            except DivergenceError:
                pass
    return ResultRow(
        n=n, r_n=r_s, lambda_rank_m=_fmt(approx.lambda_sum, ctx),
        eig_bound=eig_s, fun_bound=fun_s,
        corrections=tuple(_fmt(v, ctx) for v in approx.lambdas),
        norms=tuple(_fmt(v, ctx) for v in approx.correction_norms),
        wall_time=time.perf_counter() - t0,
    )


def _solve_one_safe(payload):
    try:
        return _solve_one(payload)
    except SolverError as exc:
        return (payload[1], f"{type(exc).__name__}: {exc}")


def run_job(cfg: JobConfig) -> list[ResultRow]:
    """One row per n, computed concurrently, returned in ascending n.

    Per-row solver failures become stderr error records and drop the row;
    r_n >= 1 is a warning only (runs regularly converge beyond the
    sufficient condition).
    """
    payloads = [(cfg, n) for n in cfg.n_set]
    if cfg.workers == 1:
        outcomes = [_solve_one_safe(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(_solve_one_safe, payloads))
    rows = sorted((oc for oc in outcomes if isinstance(oc, ResultRow)),
                  key=lambda r: r.n)
    for oc in outcomes:
        if not isinstance(oc, ResultRow):
            print(f"error: n={oc[0]}: {oc[1]}", file=sys.stderr)
    for row in rows:
        if row.r_n is not None and mpf(row.r_n) >= 1:
            print(f"warning: r_{row.n} = {mp.nstr(mpf(row.r_n), 4)} >= 1; "
                  "sufficient convergence condition fails, run proceeds",
                  file=sys.stderr)
        print(f"n={row.n} done in {row.wall_time:.2f}s", file=sys.stderr)
    if payloads and not rows:
        raise SolverError("all rows failed")
    return rows


def run_diagnostics(cfg: JobConfig) -> list[DiagnosticsRow]:
    ctx = cfg.precision
    rows = []
    for n in cfg.n_set:
        report = convergence_report(n, cfg.params, cfg.potential, ctx)
        eig_s = fun_s = None
        if cfg.rank >= 1:
            try:
                eig_b, fun_b = apriori_bounds(cfg.rank, report.r_n, report.q_inf, ctx)
                eig_s, fun_s = _fmt(eig_b, ctx), _fmt(fun_b, ctx)
            except DivergenceError:
                pass
        rows.append(DiagnosticsRow(n=n, M_n=_fmt(report.M_n, ctx),
                                   r_n=_fmt(report.r_n, ctx),
                                   eig_bound=eig_s, fun_bound=fun_s))
    return rows


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, tuple):
        return ";".join(value)
    return str(value)


def _write_output(fh, rows, fmt: str, cfg: JobConfig) -> None:
    diag = bool(rows) and isinstance(rows[0], DiagnosticsRow)
    names = DIAG_FIELDS if diag else RESULT_FIELDS
    if fmt == "csv":
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for row in rows:
            writer.writerow([_cell(getattr(row, name)) for name in names])
        return
    payload = {
        "meta": {
            "config": config_mapping(cfg, include_runtime=False),
            "version": _version(),
            "digits": cfg.precision.digits,
        },
        "rows": [
            {name: (list(v) if isinstance(v := getattr(row, name), tuple) else v)
             for name in names}
            for row in rows
        ],
    }
    json.dump(payload, fh, indent=2)
    fh.write("\n")


def _version() -> str:
    from . import __version__
    return __version__


def emit(rows, fmt: str, path: str | None, cfg: JobConfig) -> None:
    """Write rows as CSV or JSON; path None means stdout."""
    try:
        if path is None:
            _write_output(sys.stdout, rows, fmt, cfg)
        else:
            with open(path, "w", newline="") as fh:
                _write_output(fh, rows, fmt, cfg)
    except OSError as exc:
        raise IoError(str(exc)) from exc


def parse_rows(text: str) -> list[ResultRow]:
    """Inverse of the JSON emitter (round-trip helper)."""
    data = json.loads(text)
    return [
        ResultRow(n=r["n"], r_n=r["r_n"], lambda_rank_m=r["lambda_rank_m"],
                  eig_bound=r["eig_bound"], fun_bound=r["fun_bound"],
                  corrections=tuple(r["corrections"]), norms=tuple(r["norms"]))
        for r in data["rows"]
    ]


def main(argv=None) -> int:
    try:
        command, cfg = parse_config(argv)
        if command == "diagnostics":
            emit(run_diagnostics(cfg), cfg.fmt, cfg.out, cfg)
            return 0
        rows = run_job(cfg)
        emit(rows, cfg.fmt, cfg.out, cfg)
        return 0 if len(rows) == len(cfg.n_set) else 3
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
