"""Command-line driver: seeded, reproducible experiment runs emitting CSV/JSON.

Subcommands
-----------
free-profile   closed-form Green's-function profile of the disorder-free strip
dos-scan       population-dynamics density-of-states scan over an energy grid
ac-indicator   bounded-second-moment indicator across a decreasing eta schedule
gap-scan       spectral gaps of the linearized transfer operator over a grid
ce-spectrum    eigenvalues of the truncated linearized operator, per energy
crosscheck     forward recursion vs dense resolvent on shared realizations

Every run writes a JSON manifest next to its outputs: config echo, column
schema, sha256 digest per output, wall clock, warnings.  CSV floats use the
shortest round-trip decimal form, so outputs are byte-deterministic for a
fixed (config, seed) pair and independent of the worker count (the population
chunking is fixed by config, not by the machine).

Exit codes: 0 success, 2 config error, 3 domain error, 4 verification failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .ed import build_tree, draw_site_potentials, root_green_block
from .errors import (BetheStripError, ConfigError, OutOfBandError,
                     UnsupportedEnsembleError)
from .free import (a_e_matrix, free_forward_green, free_forward_green_boundary,
                   free_full_green, free_full_green_boundary)
from .linalg import SpectralPoint
from .linearization import gap_kce, gap_tensor, build_ce_matrix, verify_modulus
from .model import BetheStripModel, parse_ensemble_spec
from .recursion import eta_continuation, ac_indicator, sample_tree_given
from .rng import child_seed

# Fixed by config (recorded in the manifest), never by machine topology, so
# that different --workers values reproduce identical output bytes.
CLI_CHUNKING = 8
# Generations averaged per measurement inside eta_continuation.
MEASURE_SWEEPS = 20
CROSSCHECK_TOL = 1e-8

_SUBCOMMANDS = {
    "free-profile": "tabulate the disorder-free Green's functions on an energy grid",
    "dos-scan": "density of states via population dynamics, one row per (E, eta)",
    "ac-indicator": "stabilization of E Tr|G|^2 across a decreasing eta schedule",
    "gap-scan": "spectral gaps of the linearized transfer operator over a grid",
    "ce-spectrum": "eigenvalues of the truncated linearized operator, per energy",
    "crosscheck": "forward recursion vs dense resolvent on shared realizations",
}

# canonical config key -> argparse dest
_KEY_DEST = {
    "K": "K",
    "m": "m",
    "A": "A",
    "lambda": "lam",
    "ensemble": "ensemble",
    "E-grid": "e_grid",
    "eta-schedule": "eta_schedule",
    "pool": "pool",
    "sweeps": "sweeps",
    "burnin": "burnin",
    "samples": "samples",
    "depth": "depth",
    "degree": "degree",
    "seed": "seed",
    "workers": "workers",
    "out": "out",
}

_GLOBAL_DEFAULTS = {
    "K": "2",
    "lambda": "0.0",
    "ensemble": "goe",
    "pool": "1000",
    "sweeps": "50",
    "burnin": "100",
    "samples": "500",
    "depth": "3",
    "degree": "2",
    "seed": "0",
}

_SUB_DEFAULTS = {
    "free-profile": {"eta-schedule": "0"},
    "crosscheck": {"eta-schedule": "0.05", "samples": "20"},
}


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    g = shared.add_argument_group("configuration")
    g.add_argument("--config", metavar="PATH",
                   help="key=value file supplying defaults; flags take precedence")
    g.add_argument("--K", metavar="INT", help="branching number (>= 2)")
    g.add_argument("--m", metavar="INT", help="strip width (number of orbitals)")
    g.add_argument("--A", metavar="SPEC",
                   help='diagonal onsite matrix, e.g. "diag:-0.5,0.5"')
    g.add_argument("--lambda", dest="lam", metavar="FLOAT",
                   help="disorder coupling strength")
    g.add_argument("--ensemble", metavar="SPEC",
                   help="goe | diag:<kind> | point:<matrix-or-path>")
    g.add_argument("--E-grid", dest="e_grid", metavar="LO:HI:N",
                   help="inclusive energy grid with N points")
    g.add_argument("--eta-schedule", dest="eta_schedule", metavar="E1,E2,...",
                   help="comma-separated eta levels")
    g.add_argument("--pool", metavar="INT", help="population size")
    g.add_argument("--sweeps", metavar="INT",
                   help="relaxation sweeps per eta level after the first")
    g.add_argument("--burnin", metavar="INT", help="sweeps at the first eta level")
    g.add_argument("--samples", metavar="INT",
                   help="root draws per measured sweep; realizations for crosscheck")
    g.add_argument("--depth", metavar="INT", help="truncation depth for crosscheck")
    g.add_argument("--degree", metavar="INT", help="basis truncation degree")
    g.add_argument("--seed", metavar="INT", help="master seed")
    g.add_argument("--workers", metavar="INT",
                   help="thread count (default: $BETHE_STRIP_THREADS or 1)")
    g.add_argument("--out", metavar="PATH", help="primary output path (required)")

    parser = argparse.ArgumentParser(
        prog="bethestrip",
        description="Reproducible experiments for random operators on the Bethe strip.",
    )
    parser.add_argument("--version", action="version",
                        version=f"bethestrip {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True,
                                metavar="SUBCOMMAND")
    for name, blurb in _SUBCOMMANDS.items():
        sub.add_parser(name, parents=[shared], help=blurb, description=blurb)
    return parser


# ---------------------------------------------------------------------------
# config resolution: flag > file > per-subcommand default > global default


def _read_config_file(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    values = {}
    for lineno, line in enumerate(p.read_text().splitlines(), start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if "=" not in text:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {text!r}")
        key, _, value = text.partition("=")
        key = key.strip()
        if key not in _KEY_DEST:
            raise ConfigError(
                f"{path}:{lineno}: unknown key {key!r}; "
                f"expected one of {', '.join(_KEY_DEST)}"
            )
        values[key] = value.strip()
    return values


def _parse_int(key: str, raw: str, lo: int | None = None,
               hi: int | None = None) -> int:
    try:
        value = int(str(raw).strip(), 10)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None
    if lo is not None and value < lo:
        raise ConfigError(f"{key}: must be >= {lo}, got {value}")
    if hi is not None and value > hi:
        raise ConfigError(f"{key}: must be <= {hi}, got {value}")
    return value


def _parse_float(key: str, raw: str) -> float:
    try:
        value = float(str(raw).strip())
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{key}: must be finite, got {raw!r}")
    return value


def _parse_grid(raw: str):
    parts = str(raw).strip().split(":")
    if len(parts) != 3:
        raise ConfigError(f'E-grid: expected "lo:hi:n", got {raw!r}')
    lo = _parse_float("E-grid", parts[0])
    hi = _parse_float("E-grid", parts[1])
    n = _parse_int("E-grid", parts[2], lo=0)
    if n == 0:
        raise ConfigError("E-grid: empty grid (n = 0)")
    if lo > hi:
        raise ConfigError(f"E-grid: lo > hi ({lo:g} > {hi:g})")
    if n == 1 and lo != hi:
        raise ConfigError("E-grid: a single-point grid needs lo = hi")
    return lo, hi, n, tuple(float(x) for x in np.linspace(lo, hi, n))


def _parse_etas(raw: str) -> tuple:
    toks = [t for t in str(raw).strip().split(",") if t.strip()]
    if not toks:
        raise ConfigError("eta-schedule: empty schedule")
    return tuple(_parse_float("eta-schedule", t) for t in toks)


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    model: BetheStripModel
    e_values: tuple
    etas: tuple
    pool: int
    sweeps: int
    burnin: int
    samples: int
    depth: int
    degree: int
    seed: int
    workers: int
    out: Path
    echo: dict = field(repr=False)


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    sub = args.subcommand
    file_values = _read_config_file(args.config) if args.config else {}
    sub_defaults = _SUB_DEFAULTS.get(sub, {})

    def pick(key):
        flag = getattr(args, _KEY_DEST[key])
        if flag is not None:
            return flag
        if key in file_values:
            return file_values[key]
        if key in sub_defaults:
            return sub_defaults[key]
        return _GLOBAL_DEFAULTS.get(key)

    K = _parse_int("K", pick("K"), lo=2)

    a_raw, m_raw = pick("A"), pick("m")
    if a_raw is not None:
        if not str(a_raw).startswith("diag:"):
            raise ConfigError(f'A: expected "diag:v1,v2,...", got {a_raw!r}')
        body = str(a_raw)[len("diag:"):]
        toks = [t for t in body.split(",") if t.strip()]
        if not toks:
            raise ConfigError("A: empty diagonal")
        a = tuple(_parse_float("A", t) for t in toks)
        if m_raw is not None and _parse_int("m", m_raw, lo=1) != len(a):
            raise ConfigError(
                f"m={m_raw} disagrees with the {len(a)} entries of A"
            )
    else:
        m = _parse_int("m", m_raw, lo=1) if m_raw is not None else 1
        a = (0.0,) * m

    lam = _parse_float("lambda", pick("lambda"))
    ensemble = parse_ensemble_spec(str(pick("ensemble")), len(a))
    try:
        model = BetheStripModel(K=K, a=a, lam=lam, ensemble=ensemble)
    except (ValueError, UnsupportedEnsembleError) as exc:
        raise ConfigError(str(exc)) from None

    grid_raw = pick("E-grid")
    if grid_raw is None:
        raise ConfigError("E-grid is required")
    lo, hi, n, e_values = _parse_grid(grid_raw)

    etas_raw = pick("eta-schedule")
    if sub in ("dos-scan", "ac-indicator"):
        if etas_raw is None:
            raise ConfigError("eta-schedule is required")
        etas = _parse_etas(etas_raw)
        if any(e <= 0 for e in etas):
            raise ConfigError("eta-schedule: all levels must be positive")
        if any(b >= a_ for a_, b in zip(etas, etas[1:])):
            raise ConfigError("eta-schedule: levels must be strictly decreasing")
        if sub == "ac-indicator" and len(etas) < 3:
            raise ConfigError("ac-indicator needs at least 3 eta levels")
    elif sub == "free-profile":
        etas = _parse_etas(etas_raw)
        if any(e < 0 for e in etas):
            raise ConfigError("eta-schedule: levels must be >= 0")
    elif sub == "crosscheck":
        etas = _parse_etas(etas_raw)[:1]
        if etas[0] <= 0:
            raise ConfigError("crosscheck needs a positive eta")
    else:
        etas = ()

    pool = _parse_int("pool", pick("pool"), lo=16)
    sweeps = _parse_int("sweeps", pick("sweeps"), lo=1)
    burnin = _parse_int("burnin", pick("burnin"), lo=0)
    samples = _parse_int("samples", pick("samples"), lo=1)
    depth = _parse_int("depth", pick("depth"), lo=0)
    degree = _parse_int("degree", pick("degree"), lo=0)
    seed = _parse_int("seed", pick("seed"), lo=0)

    workers_raw = pick("workers")
    if workers_raw is None:
        workers_raw = os.environ.get("BETHE_STRIP_THREADS") or "1"
    workers = _parse_int("workers", workers_raw, lo=1)

    out_raw = pick("out")
    if out_raw is None:
        raise ConfigError("out is required")
    out = Path(str(out_raw))

    echo = {
        "subcommand": sub,
        "K": model.K,
        "m": model.m,
        "A": "diag:" + ",".join(repr(x) for x in model.a),
        "lambda": model.lam,
        "ensemble": model.ensemble.spec_string(),
        "E-grid": f"{lo!r}:{hi!r}:{n}",
        "seed": seed,
        "workers": workers,
        "out": str(out),
    }
    if etas:
        echo["eta-schedule"] = ",".join(repr(e) for e in etas)
    if sub in ("dos-scan", "ac-indicator"):
        echo.update(pool=pool, sweeps=sweeps, burnin=burnin, samples=samples,
                    chunking=CLI_CHUNKING)
        echo["measure-sweeps"] = MEASURE_SWEEPS
    if sub == "crosscheck":
        echo.update(depth=depth, samples=samples)
    if sub in ("gap-scan", "ce-spectrum"):
        echo["degree"] = degree

    return RunConfig(subcommand=sub, model=model, e_values=e_values, etas=etas,
                     pool=pool, sweeps=sweeps, burnin=burnin, samples=samples,
                     depth=depth, degree=degree, seed=seed, workers=workers,
                     out=out, echo=echo)


# ---------------------------------------------------------------------------
# output rendering


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _render_csv(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _write_bytes(path: Path, text: str) -> bytes:
    if path.parent and str(path.parent) not in ("", "."):
        path.parent.mkdir(parents=True, exist_ok=True)
    data = text.encode("utf-8")
    path.write_bytes(data)
    return data


@dataclass
class CommandResult:
    outputs: list          # [(Path, bytes), ...] in emission order
    schema: dict           # file name -> column list (CSV outputs only)
    warnings: list
    ok: bool = True
    message: str = ""


def _reim(diag) -> list:
    out = []
    for v in np.asarray(diag):
        out.extend((float(v.real), float(v.imag)))
    return out


# ---------------------------------------------------------------------------
# subcommands


def _cmd_free_profile(cfg: RunConfig) -> CommandResult:
    model, m = cfg.model, cfg.model.m
    header = ["E", "eta"]
    for tag in ("g0", "gfull", "ae"):
        for k in range(1, m + 1):
            header += [f"{tag}_re_{k}", f"{tag}_im_{k}"]
    rows = []
    outside = 0
    for E in cfg.e_values:
        for eta in cfg.etas:
            if eta > 0.0:
                sp = SpectralPoint(E, eta)
                g0 = np.diagonal(free_forward_green(sp, model))
                gf = np.diagonal(free_full_green(sp, model))
                ae = None
            else:
                g0 = np.diagonal(free_forward_green_boundary(E, model))
                gf = np.diagonal(free_full_green_boundary(E, model))
                try:
                    ae = np.diagonal(a_e_matrix(E, model))
                except OutOfBandError:
                    ae = None
                    outside += 1
            row = [float(E), float(eta)]
            row += _reim(g0)
            row += _reim(gf)
            row += _reim(ae) if ae is not None else [math.nan] * (2 * m)
            rows.append(row)
    warnings = []
    if outside:
        warnings.append(
            f"{outside} eta=0 rows outside the closed band-intersection "
            "window; ae columns emitted as nan"
        )
    data = _write_bytes(cfg.out, _render_csv(header, rows))
    return CommandResult([(cfg.out, data)], {cfg.out.name: header}, warnings)


def _continuation_records(cfg: RunConfig):
    """One eta-continuation per grid energy, each on its own child seed."""
    for i, E in enumerate(cfg.e_values):
        records = eta_continuation(
            cfg.model, float(E), cfg.etas,
            pool_size=cfg.pool, seed=child_seed(cfg.seed, i),
            burn_in=cfg.burnin, relax_sweeps=cfg.sweeps,
            measure_sweeps=MEASURE_SWEEPS, draws_per_sweep=cfg.samples,
            chunking=CLI_CHUNKING, workers=cfg.workers,
        )
        yield float(E), records


def _cmd_dos_scan(cfg: RunConfig) -> CommandResult:
    header = ["E", "eta", "dos", "dos_stderr", "ETrG2", "ETrG2_stderr"]
    rows = []
    for E, records in _continuation_records(cfg):
        for rec in records:
            ms = rec.measurement
            rows.append([E, rec.eta,
                         float(ms.dos.mean), float(ms.dos.std_error),
                         float(ms.trace_abs_sq.mean),
                         float(ms.trace_abs_sq.std_error)])
    data = _write_bytes(cfg.out, _render_csv(header, rows))
    return CommandResult([(cfg.out, data)], {cfg.out.name: header}, [])


def _cmd_ac_indicator(cfg: RunConfig) -> CommandResult:
    header = ["E", "eta", "etrg2", "etrg2_stderr"]
    rows, results = [], []
    for E, records in _continuation_records(cfg):
        for rec in records:
            ms = rec.measurement
            rows.append([E, rec.eta, float(ms.trace_abs_sq.mean),
                         float(ms.trace_abs_sq.std_error)])
        ratio, bounded, err = ac_indicator(records)
        results.append({"E": E, "ratio": ratio, "ratio_stderr": err,
                        "bounded": bounded})
    verdict = {
        "indicator": "stabilization of E Tr|G|^2 between the last two eta levels",
        "note": ("a ratio inside the window indicates a bounded second moment "
                 "(consistent with absolutely continuous spectrum); it is a "
                 "numerical indicator, not a proof"),
        "window": [0.9, 1.1],
        "results": results,
    }
    data = _write_bytes(cfg.out, _render_csv(header, rows))
    verdict_path = Path(str(cfg.out) + ".verdict.json")
    vdata = _write_bytes(verdict_path,
                         json.dumps(verdict, sort_keys=True, indent=2) + "\n")
    return CommandResult([(cfg.out, data), (verdict_path, vdata)],
                         {cfg.out.name: header}, [])


def _cmd_gap_scan(cfg: RunConfig) -> CommandResult:
    header = ["E", "gap_kce", "gap_tensor", "min_dist_inv_k"]
    rows = []
    skipped = 0
    for E in cfg.e_values:
        try:
            rows.append([float(E),
                         gap_kce(float(E), cfg.model, cfg.degree),
                         gap_tensor(float(E), cfg.model, cfg.degree),
                         verify_modulus(float(E), cfg.model,
                                        max(cfg.degree, 1))])
        except OutOfBandError:
            skipped += 1
    warnings = []
    if skipped:
        warnings.append(
            f"skipped {skipped} of {len(cfg.e_values)} grid points outside "
            "the band-intersection window"
        )
    data = _write_bytes(cfg.out, _render_csv(header, rows))
    return CommandResult([(cfg.out, data)], {cfg.out.name: header}, warnings)


def _triangularity_residual(op) -> float:
    degrees = [J.degree for J in op.basis]
    worst = 0.0
    for r in range(len(degrees)):
        for c in range(len(degrees)):
            if r != c and degrees[r] >= degrees[c]:
                worst = max(worst, abs(op.entries[r, c]))
    return float(worst)


def _cmd_ce_spectrum(cfg: RunConfig) -> CommandResult:
    header = ["E", "J", "degree", "lambda_re", "lambda_im", "modulus",
              "k_power", "tri_residual"]
    rows = []
    for E in cfg.e_values:
        op = build_ce_matrix(float(E), cfg.model, cfg.degree)
        residual = _triangularity_residual(op)
        for i, J in enumerate(op.basis):
            value = complex(op.entries[i, i])
            rows.append([float(E), ":".join(str(p) for p in J.powers),
                         J.degree, float(value.real), float(value.imag),
                         float(abs(value)),
                         float(cfg.model.K) ** (-J.degree), residual])
    data = _write_bytes(cfg.out, _render_csv(header, rows))
    return CommandResult([(cfg.out, data)], {cfg.out.name: header}, [])


def _cmd_crosscheck(cfg: RunConfig) -> CommandResult:
    model = cfg.model
    eta = cfg.etas[0]
    tree = build_tree(model.K, cfg.depth, model.m)
    cases = [(i, E, t) for i, E in enumerate(cfg.e_values)
             for t in range(cfg.samples)]

    def deviation(case):
        i, E, t = case
        potentials = draw_site_potentials(model, tree, child_seed(cfg.seed, i),
                                          realization=t)
        sp = SpectralPoint(float(E), eta)
        recursed = sample_tree_given(sp, model, tree, potentials)
        dense = root_green_block(tree, model, potentials, sp)
        return float(np.max(np.abs(recursed - dense)))

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            devs = list(pool.map(deviation, cases))
    else:
        devs = [deviation(case) for case in cases]

    worst = int(np.argmax(devs))
    max_dev = devs[worst]
    ok = max_dev <= CROSSCHECK_TOL
    report = {
        "comparison": ("root Green block: depth-limited forward recursion vs "
                       "dense resolvent of the same truncated tree, shared "
                       "potential realizations"),
        "depth": cfg.depth,
        "eta": eta,
        "energies": [float(E) for E in cfg.e_values],
        "realizations": cfg.samples,
        "cases": len(cases),
        "tolerance": CROSSCHECK_TOL,
        "max_deviation": max_dev,
        "worst_case": {"E": float(cases[worst][1]),
                       "realization": cases[worst][2]},
        "pass": ok,
    }
    data = _write_bytes(cfg.out, json.dumps(report, sort_keys=True, indent=2) + "\n")
    message = "" if ok else (f"max deviation {max_dev:.3e} exceeds "
                             f"{CROSSCHECK_TOL:g}")
    return CommandResult([(cfg.out, data)], {}, [], ok=ok, message=message)


_DISPATCH = {
    "free-profile": _cmd_free_profile,
    "dos-scan": _cmd_dos_scan,
    "ac-indicator": _cmd_ac_indicator,
    "gap-scan": _cmd_gap_scan,
    "ce-spectrum": _cmd_ce_spectrum,
    "crosscheck": _cmd_crosscheck,
}


def _write_manifest(cfg: RunConfig, result: CommandResult, wall: float) -> Path:
    outputs = {
        path.name: {"sha256": hashlib.sha256(data).hexdigest(),
                    "bytes": len(data)}
        for path, data in result.outputs
    }
    manifest = {
        "artifact": {"name": "bethestrip", "version": __version__},
        "config": cfg.echo,
        "schema_version": 1,
        "schema": result.schema,
        "outputs": outputs,
        "warnings": result.warnings,
        "wall_clock_seconds": round(wall, 3),
    }
    path = Path(str(cfg.out) + ".manifest.json")
    _write_bytes(path, json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return path


def format_config(config: dict) -> str:
    """Render a manifest config echo as a key=value file (round-trip aid)."""
    lines = [f"{key}={config[key]}" for key in sorted(config)
             if key in _KEY_DEST]
    return "\n".join(lines) + "\n"


_VALUE_FLAGS = {"--config", "--out"} | {f"--{key}" for key in _KEY_DEST}


def _preprocess_argv(argv) -> list:
    """Merge "--flag -leading-dash-value" pairs into "--flag=value".

    argparse only recognizes bare negative numbers after an option; grid and
    schedule values like "-2:2:5" or "-0.1,-0.2" would otherwise be taken for
    option strings.
    """
    merged = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if (token in _VALUE_FLAGS and i + 1 < len(argv)
                and argv[i + 1].startswith("-")
                and not argv[i + 1].startswith("--")):
            merged.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        merged.append(token)
        i += 1
    return merged


def main(argv=None) -> int:
    parser = _build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_preprocess_argv(list(argv)))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _resolve_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    start = time.perf_counter()
    try:
        result = _DISPATCH[cfg.subcommand](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BetheStripError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 3
    wall = time.perf_counter() - start
    manifest_path = _write_manifest(cfg, result, wall)
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    for path, _ in result.outputs:
        print(f"wrote {path}")
    print(f"wrote {manifest_path}")
    if not result.ok:
        print(f"verification failed: {result.message}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
