"""Command-line interface: parameter sweeps as CSV/JSON with manifests.

Subcommands
-----------
``nmse``        channel-estimation quality vs SNR (analytic, floor, empirical)
``outage``      SINR outage probability vs threshold (analytic vs empirical)
``rates``       ergodic achievable rates vs SNR with per-point optimal training
``opt-tp``      optimal training length vs SNR (exact finite-block objective)
``asymptotic``  deterministic-equivalent rate convergence and training tables
``verify``      re-run a previous sweep from its manifest and diff the outputs

Every data run writes, next to its output files, a ``*.manifest.json``
recording the resolved parameters, seed, trial count, tool version, wall
clock, and a SHA-256 digest per output file.  Re-running the same
subcommand with the same parameters and seed reproduces every data file
byte-for-byte (the manifest's wall-clock and timestamp fields are outside
that contract); ``verify`` automates the check and exits 0 on a full
match, 1 on any mismatch.

Reproducibility layout: the sweep points of a run are enumerated in a
fixed nested order (documented per runner below); point ``i`` draws from
the dedicated stream ``RandomStream(seed, stream_id=(i+1) << 20)``,
leaving stream-id headroom below for the simulator's per-batch offsets.
Sweep points are dispatched to a small thread pool; outputs are assembled
in enumeration order, so concurrency never changes the bytes.

Exit codes: 0 success; 2 usage error (bad flags or infeasible parameter
combinations); 3 internal accuracy failure (a numerical routine could not
meet its target); 1 verification mismatch.

Presets (``--preset``) reproduce the library's reference figures; any
explicitly given flag overrides the corresponding preset value:

=======  ===========  ====================================================
preset   subcommand   parameters
=======  ===========  ====================================================
fig1     nmse         4x4, T=100, Tp=4, delta {0,.05,.1,.15}, -10..60 dB
fig2     outage       5x5 and 5x30 at 30 dB, delta {0,.05,.1,.175}
fig3     rates        4x4, T=200, delta {0,.05,.15}, -10..40 dB, Tp opt.
fig4     opt-tp       4x4, T=200, delta {0,.15}, -10..40 dB
fig5     asymptotic   8x16 -> 32x64, T=500, delta {0,.1} (convergence)
fig6     asymptotic   8x16 and 8x256, T=500, delta {0,.15} (training)
=======  ===========  ====================================================
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import __version__
from .analytic import rate_ceiling, rate_closed_form, sinr_cdf
from .config import AccuracyError, Receiver, SystemConfig, db_to_linear, derive_params
from .largescale import det_rate
from .simulate import (
    RandomStream,
    empirical_nmse,
    empirical_outage,
    empirical_rate,
    sample_sinr_multi,
)
from .training import optimize_tp_asymptotic, optimize_tp_exact

__all__ = ["main"]

_RECEIVER_ORDER = (Receiver.ZF, Receiver.MRC, Receiver.MMSE)

# --------------------------------------------------------------------------
# Presets: resolved parameter values for the reference-figure sweeps.

PRESETS: dict[str, dict] = {
    "fig1": {
        "subcommand": "nmse",
        "params": {
            "nt": 4, "nr": 4, "t": 100, "tp": 4,
            "delta": [0.0, 0.05, 0.1, 0.15],
            "snr_db_min": -10.0, "snr_db_max": 60.0, "snr_db_step": 2.0,
            "trials": 100_000, "seed": 12345,
        },
    },
    "fig2": {
        "subcommand": "outage",
        "params": {
            "configs": [[5, 5], [5, 30]], "tp": None, "snr_db": 30.0,
            "delta": [0.0, 0.05, 0.1, 0.175],
            "threshold_db_min": -10.0, "threshold_db_max": 40.0,
            "threshold_db_step": 0.5,
            "trials": 100_000, "seed": 12345, "receiver": "all",
        },
    },
    "fig3": {
        "subcommand": "rates",
        "params": {
            "nt": 4, "nr": 4, "t": 200, "tp": None,
            "delta": [0.0, 0.05, 0.15],
            "snr_db_min": -10.0, "snr_db_max": 40.0, "snr_db_step": 2.0,
            "trials": 100_000, "seed": 12345, "receiver": "all",
        },
    },
    "fig4": {
        "subcommand": "opt-tp",
        "params": {
            "nt": 4, "nr": 4, "t": 200,
            "delta": [0.0, 0.15],
            "snr_db_min": -10.0, "snr_db_max": 40.0, "snr_db_step": 2.0,
            "receiver": "all", "seed": 12345,
        },
    },
    "fig5": {
        "subcommand": "asymptotic",
        "params": {
            "mode": "convergence",
            "configs": [[8, 16], [16, 32], [32, 64]], "t": 500, "tp": None,
            "delta": [0.0, 0.1],
            "snr_db_min": -10.0, "snr_db_max": 30.0, "snr_db_step": 5.0,
            "trials": 100_000, "seed": 12345, "receiver": "all",
        },
    },
    "fig6": {
        "subcommand": "asymptotic",
        "params": {
            "mode": "tp",
            "configs": [[8, 16], [8, 256]], "t": 500,
            "delta": [0.0, 0.15],
            "snr_db_min": -10.0, "snr_db_max": 30.0, "snr_db_step": 2.0,
            "receiver": "all", "seed": 12345,
        },
    },
}


# --------------------------------------------------------------------------
# Small shared helpers


def _fmt(x) -> str:
    """One CSV cell: full-precision floats, plain ints, empty for missing."""
    if x is None:
        return ""
    if isinstance(x, (bool, str)):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def _grid(lo: float, hi: float, step: float) -> list[float]:
    """Inclusive arithmetic dB grid built from an integer index (no float
    accumulation, so the spacing and endpoints are exact and reproducible)."""
    if step <= 0:
        raise click.UsageError(f"grid step must be positive, got {step}")
    if hi < lo:
        raise click.UsageError(f"empty grid: max {hi} < min {lo}")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(n)]


def _receivers(name: str) -> tuple[Receiver, ...]:
    if name == "all":
        return _RECEIVER_ORDER
    return (Receiver(name),)


def _pmap(fn, items):
    """Map over sweep points on a thread pool, results in input order."""
    items = list(items)
    if len(items) <= 1:
        return [fn(x) for x in items]
    workers = max(1, min(8, os.cpu_count() or 1, len(items)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _point_stream(seed: int, index: int) -> RandomStream:
    # Leave the low stream-id bits for the simulator's per-batch offsets.
    return RandomStream(seed, stream_id=(index + 1) << 20)


def _write_files(out_dir: Path, fmt: str, tables: dict) -> dict[str, str]:
    """Write every table as CSV or JSON; return ``{filename: sha256hex}``."""
    digests: dict[str, str] = {}
    for stem, (columns, rows) in tables.items():
        if fmt == "csv":
            name = f"{stem}.csv"
            lines = [",".join(columns)]
            lines += [",".join(_fmt(c) for c in row) for row in rows]
            payload = ("\n".join(lines) + "\n").encode("utf-8")
        else:
            name = f"{stem}.json"
            obj = {
                "columns": list(columns),
                "rows": [dict(zip(columns, row)) for row in rows],
            }
            payload = (
                json.dumps(obj, indent=2, allow_nan=False) + "\n"
            ).encode("utf-8")
        (out_dir / name).write_bytes(payload)
        digests[name] = hashlib.sha256(payload).hexdigest()
    return digests


def _emit(out_dir: Path, subcommand: str, params: dict, tables: dict,
          t0: float) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    digests = _write_files(out_dir, params["format"], tables)
    manifest = {
        "tool": "mimolink",
        "version": __version__,
        "subcommand": subcommand,
        "params": params,
        "seed": params.get("seed"),
        "trials": params.get("trials"),
        "files": digests,
        "wall_clock_sec": round(time.time() - t0, 3),
        "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    mpath = out_dir / f"{subcommand.replace('-', '_')}.manifest.json"
    mpath.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    for name in digests:
        click.echo(f"wrote {out_dir / name}")
    click.echo(f"wrote {mpath}")
    return mpath


# --------------------------------------------------------------------------
# Runners: params -> {file_stem: (columns, rows)}.  Pure functions of the
# resolved params, which is what lets `verify` replay them bit-for-bit.


def _run_nmse(params: dict) -> dict:
    snrs = _grid(params["snr_db_min"], params["snr_db_max"], params["snr_db_step"])
    deltas = params["delta"]
    trials, seed = params["trials"], params["seed"]

    # Point order: snr-major, delta-minor.
    points = list(enumerate((s, d) for s in snrs for d in deltas))

    def work(point):
        i, (snr_db, delta) = point
        cfg = SystemConfig(
            nt=params["nt"], nr=params["nr"], t=params["t"], tp=params["tp"],
            rho=db_to_linear(snr_db), delta=delta,
        )
        dp = derive_params(cfg)
        floor = 0.0 if delta == 0.0 else 1.0 / (
            1.0 + cfg.tp / (cfg.nt * delta * delta)
        )
        emp = empirical_nmse(cfg, trials, _point_stream(seed, i))
        return [snr_db, delta, dp.sigma2_err, floor, emp]

    rows = _pmap(work, points)
    cols = ["snr_dB", "delta", "nmse_analytic", "nmse_floor", "nmse_empirical"]
    return {"nmse": (cols, rows)}


def _run_outage(params: dict) -> dict:
    configs = [tuple(c) for c in params["configs"]]
    deltas = params["delta"]
    rho = db_to_linear(params["snr_db"])
    thresholds_db = _grid(
        params["threshold_db_min"], params["threshold_db_max"],
        params["threshold_db_step"],
    )
    receivers = _receivers(params["receiver"])
    trials, seed = params["trials"], params["seed"]

    # Point order: config-major, delta-minor; one simulation per point is
    # shared by every receiver and threshold.  The SINR statistics do not
    # depend on the block length, so any t > tp serves.
    points = list(enumerate((c, d) for c in configs for d in deltas))

    def work(point):
        i, ((nt, nr), delta) = point
        tp = params["tp"] if params["tp"] is not None else nt
        cfg = SystemConfig(nt=nt, nr=nr, t=2 * tp + 2, tp=tp, rho=rho,
                           delta=delta)
        samples = sample_sinr_multi(cfg, receivers, trials, _point_stream(seed, i))
        rows = []
        for receiver in receivers:
            for x_db in thresholds_db:
                x = db_to_linear(x_db)
                rows.append([
                    nt, nr, x, str(receiver), delta,
                    sinr_cdf(receiver, cfg, x),
                    empirical_outage(samples[receiver], x),
                ])
        return rows

    rows = [r for chunk in _pmap(work, points) for r in chunk]
    cols = ["nt", "nr", "threshold", "receiver", "delta",
            "outage_analytic", "outage_empirical"]
    return {"outage": (cols, rows)}


def _run_rates(params: dict) -> dict:
    snrs = _grid(params["snr_db_min"], params["snr_db_max"], params["snr_db_step"])
    deltas = params["delta"]
    receivers = _receivers(params["receiver"])
    trials, seed = params["trials"], params["seed"]
    fixed_tp = params["tp"]

    # Point order: snr-major, then delta, then receiver.
    points = list(enumerate(
        (s, d, r) for s in snrs for d in deltas for r in receivers))

    def work(point):
        i, (snr_db, delta, receiver) = point
        base = SystemConfig(
            nt=params["nt"], nr=params["nr"], t=params["t"],
            tp=fixed_tp if fixed_tp is not None else params["nt"],
            rho=db_to_linear(snr_db), delta=delta,
        )
        if fixed_tp is None:
            opt = optimize_tp_exact(base, receiver)
            tp_star, analytic = opt.tp_star, opt.rate_at_star
        else:
            tp_star, analytic = fixed_tp, rate_closed_form(receiver, base)
        cfg = base.with_tp(tp_star)
        emp = empirical_rate(cfg, receiver, trials, _point_stream(seed, i))
        ceiling = None if delta == 0.0 else rate_ceiling(receiver, cfg)
        return [snr_db, str(receiver), delta, analytic, emp, ceiling, tp_star]

    rows = _pmap(work, points)
    cols = ["snr_dB", "receiver", "delta", "rate_analytic", "rate_empirical",
            "rate_ceiling", "tp_star"]
    return {"rates": (cols, rows)}


def _run_opt_tp(params: dict) -> dict:
    snrs = _grid(params["snr_db_min"], params["snr_db_max"], params["snr_db_step"])
    deltas = params["delta"]
    receivers = _receivers(params["receiver"])

    points = [(s, d, r) for s in snrs for d in deltas for r in receivers]

    def work(point):
        snr_db, delta, receiver = point
        cfg = SystemConfig(
            nt=params["nt"], nr=params["nr"], t=params["t"], tp=params["nt"],
            rho=db_to_linear(snr_db), delta=delta,
        )
        res = optimize_tp_exact(cfg, receiver)
        return [snr_db, str(receiver), delta, res.tp_star]

    rows = _pmap(work, points)
    return {"opt_tp": (["snr_dB", "receiver", "delta", "tp_star"], rows)}


def _run_asymptotic(params: dict) -> dict:
    mode = params["mode"]
    snrs = _grid(params["snr_db_min"], params["snr_db_max"], params["snr_db_step"])
    deltas = params["delta"]
    receivers = _receivers(params["receiver"])
    seed = params["seed"]
    out: dict = {}

    if mode in ("both", "convergence"):
        configs = [tuple(c) for c in params["configs"]]
        trials = params["trials"]
        # Point order: config-major, then delta, then snr; receivers share
        # each point's channel draws.
        points = list(enumerate(
            (c, d, s) for c in configs for d in deltas for s in snrs))

        def work_conv(point):
            i, ((nt, nr), delta, snr_db) = point
            tp = params.get("tp") if params.get("tp") is not None else nt
            cfg = SystemConfig(nt=nt, nr=nr, t=params["t"], tp=tp,
                               rho=db_to_linear(snr_db), delta=delta)
            samples = sample_sinr_multi(
                cfg, receivers, trials, _point_stream(seed, i))
            rows = []
            for receiver in receivers:
                det = det_rate(receiver, cfg)
                s = samples[receiver].samples
                emp = (cfg.td / cfg.t) * cfg.nt * float(np.mean(np.log2(1.0 + s)))
                rows.append([nt, nr, snr_db, str(receiver), delta, det, emp,
                             abs(det - emp) / emp])
            return rows

        rows = [r for chunk in _pmap(work_conv, points) for r in chunk]
        out["asymptotic_convergence"] = (
            ["nt", "nr", "snr_dB", "receiver", "delta", "rate_det",
             "rate_empirical", "rel_deviation"], rows)

    if mode in ("both", "tp"):
        configs = [tuple(c) for c in params.get("tp_configs") or params["configs"]]
        points = [(c, d, s, r) for c in configs for d in deltas
                  for s in snrs for r in receivers]

        def work_tp(point):
            (nt, nr), delta, snr_db, receiver = point
            cfg = SystemConfig(nt=nt, nr=nr, t=params["t"], tp=nt,
                               rho=db_to_linear(snr_db), delta=delta)
            res = optimize_tp_asymptotic(cfg, receiver)
            return [nt, nr, snr_db, str(receiver), delta, res.tp_star]

        rows = _pmap(work_tp, points)
        out["asymptotic_tp"] = (
            ["nt", "nr", "snr_dB", "receiver", "delta", "tp_star_asymptotic"],
            rows)

    return out


_RUNNERS = {
    "nmse": _run_nmse,
    "outage": _run_outage,
    "rates": _run_rates,
    "opt-tp": _run_opt_tp,
    "asymptotic": _run_asymptotic,
}


# --------------------------------------------------------------------------
# Option plumbing


def _shared_options(fn):
    opts = [
        click.option("--nt", type=int, default=None, help="Transmit antennas."),
        click.option("--nr", type=int, default=None, help="Receive antennas."),
        click.option("--t", type=int, default=None, help="Coherence block length."),
        click.option("--tp", type=int, default=None, help="Training length."),
        click.option("--delta", type=float, multiple=True,
                     help="Impairment level (repeatable)."),
        click.option("--snr-db-min", type=float, default=None),
        click.option("--snr-db-max", type=float, default=None),
        click.option("--snr-db-step", type=float, default=None),
        click.option("--trials", type=int, default=None,
                     help="Monte Carlo trials per sweep point."),
        click.option("--seed", type=int, default=None, help="Base RNG seed."),
        click.option("--receiver",
                     type=click.Choice(["zf", "mrc", "mmse", "all"]),
                     default=None),
        click.option("--format", "format", type=click.Choice(["csv", "json"]),
                     default=None, help="Output file format (default csv)."),
        click.option("--out", type=click.Path(file_okay=False), default=None,
                     help="Output directory (default: current directory)."),
        click.option("--preset", type=click.Choice(sorted(PRESETS)), default=None,
                     help="Reference-figure parameter set; flags override it."),
        click.option("--emit-plot-script", is_flag=True, default=False,
                     help="Also write a matplotlib script that renders the CSV."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _resolve(subcommand: str, defaults: dict, preset: str | None,
             cli: dict) -> dict:
    """Layer parameters: subcommand defaults < preset < explicit flags."""
    params = dict(defaults)
    if preset is not None:
        pre = PRESETS[preset]
        if pre["subcommand"] != subcommand:
            raise click.UsageError(
                f"preset {preset!r} belongs to subcommand {pre['subcommand']!r}")
        params.update(pre["params"])
    multi_config = "configs" in params
    for key, value in cli.items():
        if value is None:
            continue
        if key == "delta":
            if len(value) > 0:
                params["delta"] = [float(v) for v in value]
        elif key in ("nt", "nr") and multi_config:
            # An explicit antenna flag collapses a multi-config default to
            # the single requested configuration.
            first = params["configs"][0]
            nt = cli.get("nt") if cli.get("nt") is not None else first[0]
            nr = cli.get("nr") if cli.get("nr") is not None else first[1]
            params["configs"] = [[nt, nr]]
            params["tp_configs"] = [[nt, nr]] if "tp_configs" in params else None
        else:
            params[key] = value
    params.setdefault("format", "csv")
    if params["format"] is None:
        params["format"] = "csv"
    return params


def _plot_script(subcommand: str, stem: str, columns: list[str]) -> str:
    """A small deterministic matplotlib script rendering one CSV."""
    x_col = "threshold" if stem == "outage" else columns[0]
    key_cols = [c for c in ("nt", "nr", "receiver", "delta") if c in columns]
    y_cols = [c for c in columns if c != x_col and c not in key_cols]
    lines = [
        "#!/usr/bin/env python3",
        f'"""Render {stem}.csv (written by `mimolink {subcommand}`)."""',
        "import csv",
        "from collections import defaultdict",
        "",
        "import matplotlib.pyplot as plt",
        "",
        f'with open("{stem}.csv", newline="", encoding="utf-8") as fh:',
        "    rows = list(csv.DictReader(fh))",
        "",
        f"key_cols = {key_cols!r}",
        f'x_col = "{x_col}"',
        f"y_cols = {y_cols!r}",
        "series = defaultdict(list)",
        "for row in rows:",
        "    series[tuple(row[c] for c in key_cols)].append(row)",
        "",
        "fig, ax = plt.subplots(figsize=(7, 5))",
        "for key, pts in series.items():",
        "    xs = [float(p[x_col]) for p in pts]",
        "    for y in y_cols:",
        "        ys = [float(p[y]) if p[y] else float('nan') for p in pts]",
        '        ax.plot(xs, ys, label=" ".join(key) + " " + y)',
        "ax.set_xlabel(x_col)",
        "ax.legend(fontsize=6)",
        "ax.grid(True, alpha=0.3)",
        f'fig.savefig("{stem}.png", dpi=150)',
        f'print("wrote {stem}.png")',
        "",
    ]
    return "\n".join(lines)


def _parse_configs(values) -> list[list[int]]:
    """Parse repeated NTxNR antenna-configuration strings (e.g. ``5x30``)."""
    out = []
    for text in values:
        parts = text.lower().split("x")
        try:
            nt, nr = (int(p) for p in parts)
        except ValueError:
            raise click.UsageError(
                f"bad antenna configuration {text!r}: expected NTxNR, e.g. 5x30"
            ) from None
        if nt < 1 or nr < 1:
            raise click.UsageError(
                f"bad antenna configuration {text!r}: counts must be >= 1"
            )
        out.append([nt, nr])
    return out


def _execute(subcommand: str, defaults: dict, preset, out, emit_plot_script,
             cli: dict) -> None:
    t0 = time.time()
    params = _resolve(subcommand, defaults, preset, cli)
    out_dir = Path(out) if out else Path(".")
    try:
        tables = _RUNNERS[subcommand](params)
    except ValueError as exc:
        # Infeasible parameter combinations surface as config validation
        # errors; those are usage errors, not internal failures.
        raise click.UsageError(str(exc)) from exc
    if emit_plot_script and params["format"] == "csv":
        out_dir.mkdir(parents=True, exist_ok=True)
        for stem, (columns, _) in tables.items():
            path = out_dir / f"plot_{stem}.py"
            path.write_text(_plot_script(subcommand, stem, columns),
                            encoding="utf-8")
            click.echo(f"wrote {path}")
    _emit(out_dir, subcommand, params, tables, t0)


class _AccuracyExit(click.ClickException):
    exit_code = 3


class _Group(click.Group):
    """Translates internal accuracy failures into exit code 3."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except AccuracyError as exc:
            raise _AccuracyExit(f"accuracy failure: {exc}") from exc


@click.group(cls=_Group)
@click.version_option(version=__version__, prog_name="mimolink")
def main() -> None:
    """Training-based MIMO link analysis under residual transmit impairments."""


@main.command()
@_shared_options
def nmse(preset, out, emit_plot_script, **cli) -> None:
    """Channel-estimation NMSE vs SNR: analytic curve, floor, empirical."""
    _execute("nmse", dict(PRESETS["fig1"]["params"]), preset, out,
             emit_plot_script, cli)


@main.command()
@_shared_options
@click.option("--snr-db", type=float, default=None,
              help="Operating SNR in dB (the x axis is the SINR threshold).")
@click.option("--threshold-db-min", type=float, default=None)
@click.option("--threshold-db-max", type=float, default=None)
@click.option("--threshold-db-step", type=float, default=None)
@click.option("--config", "configs", multiple=True,
              help="Antenna configuration NTxNR (repeatable), e.g. 5x30.")
def outage(preset, out, emit_plot_script, configs, **cli) -> None:
    """SINR outage probability vs threshold, analytic vs empirical."""
    if configs:
        cli["configs"] = _parse_configs(configs)
    _execute("outage", dict(PRESETS["fig2"]["params"]), preset, out,
             emit_plot_script, cli)


@main.command()
@_shared_options
def rates(preset, out, emit_plot_script, **cli) -> None:
    """Ergodic achievable rates vs SNR; the training length is optimized
    per point unless --tp pins it."""
    _execute("rates", dict(PRESETS["fig3"]["params"]), preset, out,
             emit_plot_script, cli)


@main.command("opt-tp")
@_shared_options
def opt_tp(preset, out, emit_plot_script, **cli) -> None:
    """Optimal training length vs SNR from the exact rate objective."""
    _execute("opt-tp", dict(PRESETS["fig4"]["params"]), preset, out,
             emit_plot_script, cli)


@main.command()
@_shared_options
@click.option("--mode", type=click.Choice(["both", "convergence", "tp"]),
              default=None, help="Which asymptotic tables to produce.")
@click.option("--config", "configs", multiple=True,
              help="Antenna configuration NTxNR (repeatable).")
def asymptotic(preset, out, emit_plot_script, configs, **cli) -> None:
    """Deterministic-equivalent rates vs simulation, plus asymptotic
    training-length tables."""
    defaults = {
        "mode": "both",
        "configs": [[8, 16], [16, 32], [32, 64]],
        "tp_configs": [[8, 16], [8, 256]],
        "t": 500, "tp": None,
        "delta": [0.0, 0.1],
        "snr_db_min": -10.0, "snr_db_max": 30.0, "snr_db_step": 5.0,
        "trials": 100_000, "seed": 12345, "receiver": "all",
    }
    if configs:
        parsed = _parse_configs(configs)
        cli["configs"] = parsed
        cli["tp_configs"] = parsed
    _execute("asymptotic", defaults, preset, out, emit_plot_script, cli)


@main.command()
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@click.option("--keep", type=click.Path(file_okay=False), default=None,
              help="Directory to keep the re-run outputs in (default: temp).")
def verify(manifest: str, keep: str | None) -> None:
    """Re-run a sweep from its manifest and diff every output file.

    Each recorded file is checked two ways: the re-run must reproduce the
    recorded digest (MISMATCH otherwise), and any copy still sitting next
    to the manifest must be unmodified (DRIFT otherwise).  Exits 0 when
    everything matches byte-for-byte, 1 otherwise.
    """
    with open(manifest, encoding="utf-8") as fh:
        doc = json.load(fh)
    subcommand = doc.get("subcommand")
    if subcommand not in _RUNNERS:
        raise click.UsageError(f"manifest names unknown subcommand {subcommand!r}")
    params = doc["params"]

    def replay(target: Path) -> dict[str, str]:
        tables = _RUNNERS[subcommand](params)
        return _write_files(target, params.get("format", "csv"), tables)

    if keep is not None:
        target = Path(keep)
        target.mkdir(parents=True, exist_ok=True)
        fresh = replay(target)
    else:
        with tempfile.TemporaryDirectory(prefix="mimolink-verify-") as tmp:
            fresh = replay(Path(tmp))

    run_dir = Path(manifest).parent
    ok = True
    for name, digest in sorted(doc["files"].items()):
        got = fresh.get(name)
        if got is None:
            click.echo(f"MISSING   {name}")
            ok = False
        elif got != digest:
            click.echo(f"MISMATCH  {name}")
            ok = False
        else:
            on_disk = run_dir / name
            if on_disk.exists() and (
                hashlib.sha256(on_disk.read_bytes()).hexdigest() != digest
            ):
                click.echo(f"DRIFT     {name} (file next to manifest was modified)")
                ok = False
            else:
                click.echo(f"OK        {name}")
    if not ok:
        sys.exit(1)
    click.echo("verified: all outputs reproduce byte-identically")


if __name__ == "__main__":  # pragma: no cover
    main()
