"""Experiment orchestration: sweeps, aggregation, overlays, reports.

A sweep runs many disorder realizations per parameter point (the coupling
range ``band_b`` for the spin model, the disorder strength ``w`` for the
lattice model), pools the per-eigenstate measures over realizations and the
mid-spectrum window, computes Lambda per point, and writes CSV results, an
SVG plot per overlay, and a reproducibility manifest.

Determinism: every realization is a pure function of (spec, index, master
seed); workers return per-realization records that are folded in realization
index order by a single thread, so the output files are byte-identical for
any worker count.
"""

import csv
import hashlib
import math
import os
from dataclasses import dataclass, field, asdict
from multiprocessing import get_context

import numpy as np

from . import complexity, ensembles, entanglement, oracle, spectral, theory

__all__ = [
    "ExperimentConfig",
    "OracleConfig",
    "parse_config",
    "run_sweep",
    "overlay_theory",
    "collapse_gap",
    "run_oracle",
    "SweepResult",
    "load_sweep_csv",
    "svg_line_plot",
]

QREM_MEASURES = ("r1", "s2", "s3", "s_l", "q", "r0")
ANDERSON_MEASURES = ("p_a", "p_a_p_b", "spee")


@dataclass
class ExperimentConfig:
    model: str  # 'qrem' | 'anderson'
    sweep: tuple  # band_b values (qrem) or diag_w values (anderson)
    realizations: int
    master_seed: int = 1
    out_dir: str = "results"
    workers: int = 1
    chi0: float = 1.0
    window_fraction: float = 0.01
    window_min_states: int = 8
    target_energy: float = 0.0
    # qrem
    n_spins: int = 0
    l_a: int = 0  # 0 -> balanced
    # anderson
    side: int = 0
    shell_k: int = 1
    hop_mean_t: float = 1.0
    hop_var_w1: float = 0.0

    def __post_init__(self):
        if self.model not in ("qrem", "anderson"):
            raise ValueError(f"unknown model {self.model!r}")
        if not self.sweep:
            raise ValueError("sweep must be nonempty")
        if sorted(self.sweep) != list(self.sweep) and sorted(self.sweep, reverse=True) != list(self.sweep):
            raise ValueError("sweep values must be sorted")
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        if self.model == "qrem" and self.n_spins < 2:
            raise ValueError("qrem needs n_spins >= 2")
        if self.model == "anderson" and self.side < 2:
            raise ValueError("anderson needs side >= 2")


@dataclass
class OracleConfig:
    kind: str  # 'schmidt_walk' | 'spee_walk' | 'eig_langevin' | 'w_moment'
    n_traj: int = 2000
    seed: int = 1
    out_dir: str = "results"
    n_a: int = 4
    n_b: int = 4
    n_sites: int = 64
    lambda_max: float = 0.5
    grid_points: int = 10
    d_lambda: float = 0.0
    epsilon: float = 0.25  # starting-state weight for the w_moment check

    def __post_init__(self):
        if self.kind not in ("schmidt_walk", "spee_walk", "eig_langevin", "w_moment"):
            raise ValueError(f"unknown oracle kind {self.kind!r}")


_RUN_KEYS = {
    "model": str,
    "sweep": "floats",
    "realizations": int,
    "master_seed": int,
    "out_dir": str,
    "workers": int,
    "chi0": float,
    "window_fraction": float,
    "window_min_states": int,
    "target_energy": float,
    "n_spins": int,
    "l_a": int,
    "side": int,
    "shell_k": int,
    "hop_mean_t": float,
    "hop_var_w1": float,
}

_ORACLE_KEYS = {
    "kind": str,
    "n_traj": int,
    "seed": int,
    "out_dir": str,
    "n_a": int,
    "n_b": int,
    "n_sites": int,
    "lambda_max": float,
    "grid_points": int,
    "d_lambda": float,
    "epsilon": float,
}


def _parse_flat(path):
    """Flat key = value text; '#' starts a comment; returns raw dict."""
    raw = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if key in raw:
                raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
            raw[key] = value
    return raw


def parse_config(path, schema="run"):
    """Parse a flat key=value config file into a config object.

    ``schema`` is 'run' (sweep configs) or 'oracle'.  Unknown keys are
    errors.
    """
    keys = _RUN_KEYS if schema == "run" else _ORACLE_KEYS
    raw = _parse_flat(path)
    parsed = {}
    for key, value in raw.items():
        if key not in keys:
            raise ValueError(f"unknown config key {key!r} in {path}")
        conv = keys[key]
        if conv == "floats":
            parsed[key] = tuple(float(tok) for tok in value.replace(",", " ").split())
        else:
            parsed[key] = conv(value)
    if schema == "run":
        return ExperimentConfig(**parsed)
    return OracleConfig(**parsed)


# ---------------------------------------------------------------------------
# per-realization work (module-level so worker processes can pickle it)


def _realization_task(args):
    """Diagonalize one realization and measure every windowed eigenstate."""
    (model, spec, index, master_seed, fraction, min_states, target_energy, l_a) = args
    if model == "qrem":
        sample = ensembles.sample_qrem(spec, index, master_seed)
        part = entanglement.spin_split(spec.n_spins, l_a or None)
    else:
        sample = ensembles.sample_anderson(spec, index, master_seed)
        part = entanglement.site_split(spec.side, spec.dim)
    eigs, vecs = spectral.diagonalize(sample)
    window = spectral.select_window(eigs, vecs, target_energy, fraction, min_states)
    iprs = np.sum(window.eigenvectors ** 4, axis=0)

    rows = []
    for k in range(window.n_states):
        rec = entanglement.measure_record(window.eigenvectors[:, k], part)
        rows.append(rec)
    return {
        "index": index,
        "delta_e": window.delta_e,
        "iprs": iprs,
        "records": rows,
        "n_window": window.n_states,
    }


@dataclass
class _WindowStats:
    """Pooled window statistics standing in for a single SpectralWindow."""

    mean_ipr: float
    delta_e: float


@dataclass
class SweepResult:
    config: ExperimentConfig
    points: list  # one dict per sweep point
    measures: tuple
    csv_path: str = ""


def _aggregate_point(cfg, param, tasks, w_min, w_max):
    """Fold per-realization outputs (already index-ordered) into one row."""
    measures = QREM_MEASURES if cfg.model == "qrem" else ANDERSON_MEASURES
    delta_e = float(np.mean([t["delta_e"] for t in tasks]))
    iprs = np.concatenate([t["iprs"] for t in tasks])
    records = [r for t in tasks for r in t["records"]]
    n_window = sum(t["n_window"] for t in tasks)

    if cfg.model == "anderson":
        records = [r for r in records if r.p_a >= 0.5]
        if not records:
            raise RuntimeError(
                f"no eigenstates survive the P_A >= 1/2 filter at w={param}"
            )

    row = {
        "param": float(param),
        "n_realizations": len(tasks),
        "n_window_states": n_window,
        "n_states": len(records),
        "delta_e": delta_e,
        "mean_ipr": float(np.mean(iprs)),
    }

    if cfg.model == "qrem":
        n = 2 ** cfg.n_spins
        y = complexity.y_qrem(cfg.n_spins, param, gamma=0.5)
    else:
        n = cfg.side ** 3
        spec0 = _anderson_spec(cfg, param, w_min, w_max)
        y = complexity.y_anderson(
            n, spec0.coordination, param, w_max, spec0.gamma, cfg.hop_mean_t
        )
    window_stats = _WindowStats(mean_ipr=row["mean_ipr"], delta_e=delta_e)
    point = complexity.lambda_from(y, window_stats, n, cfg.chi0)
    row["y_minus_y0"] = point.y_minus_y0
    row["lambda"] = point.lam
    row["lambda_over_n"] = point.lambda_over_n

    for name in measures:
        vals = np.array([getattr(r, name) for r in records])
        row[f"mean_{name}"] = float(np.mean(vals))
        row[f"var_{name}"] = float(np.var(vals, ddof=1)) if len(vals) > 1 else 0.0
        row[f"se_{name}"] = (
            float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
        )
    if cfg.model == "qrem":
        r0_vals = np.array([r.r0 for r in records])
        r1_vals = np.array([r.r1 for r in records])
        row["cov_r0_r1"] = (
            float(np.cov(r0_vals, r1_vals, ddof=1)[0, 1]) if len(records) > 1 else 0.0
        )
        row["n_r0_saturated"] = int(sum(r.r0_saturated for r in records))
    return row


def _anderson_spec(cfg, w, w_min, w_max):
    return ensembles.AndersonSpec(
        side=cfg.side,
        diag_w=w,
        hop_var_w1=cfg.hop_var_w1,
        hop_mean_t=cfg.hop_mean_t,
        shell_k=cfg.shell_k,
        gamma=1.0 / (2.0 * w_min ** 2),
        w_ref=w_max,
    )


def run_sweep(cfg):
    """Run a full sweep and write sweep.csv plus a manifest."""
    os.makedirs(cfg.out_dir, exist_ok=True)
    w_min, w_max = min(cfg.sweep), max(cfg.sweep)
    points = []
    for param in cfg.sweep:
        if cfg.model == "qrem":
            spec = ensembles.QremSpec(n_spins=cfg.n_spins, band_b=param)
        else:
            spec = _anderson_spec(cfg, param, w_min, w_max)
        args = [
            (
                cfg.model,
                spec,
                index,
                cfg.master_seed,
                cfg.window_fraction,
                cfg.window_min_states,
                cfg.target_energy,
                cfg.l_a,
            )
            for index in range(cfg.realizations)
        ]
        if cfg.workers > 1:
            with get_context("fork").Pool(cfg.workers) as pool:
                tasks = pool.map(_realization_task, args)
        else:
            tasks = [_realization_task(a) for a in args]
        tasks.sort(key=lambda t: t["index"])  # deterministic fold order
        points.append(_aggregate_point(cfg, param, tasks, w_min, w_max))

    measures = QREM_MEASURES if cfg.model == "qrem" else ANDERSON_MEASURES
    result = SweepResult(config=cfg, points=points, measures=measures)
    result.csv_path = os.path.join(cfg.out_dir, "sweep.csv")
    _write_sweep_csv(result)
    _write_manifest(cfg, [result.csv_path], os.path.join(cfg.out_dir, "manifest.txt"))
    return result


def _sweep_columns(measures, model):
    cols = [
        "param",
        "lambda",
        "lambda_over_n",
        "y_minus_y0",
        "mean_ipr",
        "delta_e",
        "n_realizations",
        "n_window_states",
        "n_states",
    ]
    for name in measures:
        cols += [f"mean_{name}", f"var_{name}", f"se_{name}"]
    if model == "qrem":
        cols += ["cov_r0_r1", "n_r0_saturated"]
    return cols


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _write_sweep_csv(result):
    cols = _sweep_columns(result.measures, result.config.model)
    with open(result.csv_path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in result.points:
            fh.write(",".join(_fmt(row[c]) for c in cols) + "\n")


def load_sweep_csv(path):
    """Read a sweep.csv back as a list of dicts with float values."""
    rows = []
    with open(path) as fh:
        for row in csv.DictReader(fh):
            rows.append({k: float(v) for k, v in row.items()})
    return rows


def _write_manifest(cfg, files, path):
    digest = hashlib.sha256(repr(asdict(cfg)).encode()).hexdigest()[:16]
    with open(path, "w") as fh:
        fh.write(f"config_digest = {digest}\n")
        for key, value in asdict(cfg).items():
            if isinstance(value, tuple):
                value = " ".join(_fmt(v) for v in value)
            fh.write(f"{key} = {value}\n")
        for f in files:
            fh.write(f"output = {os.path.basename(f)}\n")


# ---------------------------------------------------------------------------
# theory overlays and the collapse diagnostic

_OVERLAY_KINDS = ("avg_r1", "avg_s2", "avg_s3", "var_s2", "avg_pa", "avg_papb", "var_papb", "spee")


def _theory_values(kind, cfg, grid):
    if cfg.model == "qrem":
        dims = theory.BipartiteDims(2 ** (cfg.l_a or cfg.n_spins // 2),
                                    2 ** (cfg.n_spins - (cfg.l_a or cfg.n_spins // 2)))
        if kind == "avg_r1":
            return theory.avg_r1(dims, grid)
        if kind == "avg_s2":
            return theory.avg_s2(dims, grid)
        if kind == "avg_s3":
            return theory.avg_s3(dims, grid)
        if kind == "var_s2":
            return theory.var_s2(dims, grid)
    else:
        n = cfg.side ** 3
        if kind == "avg_pa":
            return theory.avg_pa(n, grid)
        if kind == "avg_papb":
            return theory.avg_papb(n, grid)
        if kind == "var_papb":
            return theory.papb_variance_ode(n, np.concatenate(([0.0], grid)))[1:]
        if kind == "spee":
            return np.full(len(grid), theory.spee_ergodic(n))
    raise ValueError(f"overlay kind {kind!r} not defined for model {cfg.model!r}")


_KIND_COLUMN = {
    "avg_r1": "mean_r1",
    "avg_s2": "mean_s2",
    "avg_s3": "mean_s3",
    "var_s2": "var_s2",
    "avg_pa": "mean_p_a",
    "avg_papb": "mean_p_a_p_b",
    "var_papb": "var_p_a_p_b",
    "spee": "mean_spee",
}


def overlay_theory(result, kinds, out_dir=None):
    """Align numeric sweep columns with theory curves; write CSV + SVG.

    For each kind, emits ``overlay_<kind>.csv`` with the numeric values, the
    theory values at the same Lambda, and both rescaled by their maximum
    (which removes overall finite-size offsets), plus an SVG plot.  Returns
    a summary dict {kind: max relative deviation}.
    """
    if not kinds:
        return {}
    cfg = result.config
    out_dir = out_dir or cfg.out_dir
    os.makedirs(out_dir, exist_ok=True)
    grid = np.array([row["lambda"] for row in result.points])
    summary = {}
    files = []
    for kind in kinds:
        if kind not in _OVERLAY_KINDS:
            raise ValueError(f"unknown overlay kind {kind!r}")
        numeric = np.array([row[_KIND_COLUMN[kind]] for row in result.points])
        th = np.asarray(_theory_values(kind, cfg, grid), dtype=float)
        num_max = np.max(np.abs(numeric)) or 1.0
        th_max = np.max(np.abs(th)) or 1.0
        # floor the denominator at 5% of the curve scale so points where the
        # theory curve crosses zero do not dominate the summary
        rel = np.abs(numeric - th) / np.maximum(np.abs(th), 0.05 * th_max)
        summary[kind] = float(np.max(rel))
        path = os.path.join(out_dir, f"overlay_{kind}.csv")
        with open(path, "w") as fh:
            fh.write("lambda,numeric,theory,numeric_rescaled,theory_rescaled,rel_dev\n")
            for i in range(len(grid)):
                fh.write(
                    f"{grid[i]:.17g},{numeric[i]:.17g},{th[i]:.17g},"
                    f"{numeric[i] / num_max:.17g},{th[i] / th_max:.17g},{rel[i]:.17g}\n"
                )
        svg_path = os.path.join(out_dir, f"overlay_{kind}.svg")
        svg_line_plot(
            svg_path,
            [
                {"x": grid, "y": numeric, "label": "numeric", "style": "points"},
                {"x": grid, "y": th, "label": "theory", "style": "dashed"},
            ],
            title=kind,
            xlabel="lambda",
            ylabel=kind,
        )
        files += [path, svg_path]
    _write_manifest(cfg, files, os.path.join(out_dir, "overlay_manifest.txt"))
    return summary


def collapse_gap(curves):
    """Max pairwise vertical gap between rescaled curves on a common grid.

    ``curves`` is a list of (x, y) pairs; each y is rescaled by its maximum
    and interpolated onto the overlapping x-range.  When every x value is
    positive the common grid is geometric and interpolation is done in
    log-x (the natural axis for these curves, which spread over many
    decades); otherwise both are linear.  Returns a matrix of pairwise gaps
    as a dict {(i, j): gap}.
    """
    rescaled = []
    for x, y in curves:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        order = np.argsort(x)
        rescaled.append((x[order], y[order] / np.max(np.abs(y))))
    gaps = {}
    for i in range(len(rescaled)):
        for j in range(i + 1, len(rescaled)):
            xi, yi = rescaled[i]
            xj, yj = rescaled[j]
            lo = max(xi[0], xj[0])
            hi = min(xi[-1], xj[-1])
            if hi <= lo:
                raise ValueError("curves do not overlap in x")
            if lo > 0:
                common = np.linspace(math.log(lo), math.log(hi), 512)
                ai, aj = np.log(xi), np.log(xj)
            else:
                common = np.linspace(lo, hi, 512)
                ai, aj = xi, xj
            gap = np.max(np.abs(np.interp(common, ai, yi) - np.interp(common, aj, yj)))
            gaps[(i, j)] = float(gap)
    return gaps


# ---------------------------------------------------------------------------
# oracle orchestration


def run_oracle(cfg):
    """Run one oracle experiment and write its report CSV."""
    os.makedirs(cfg.out_dir, exist_ok=True)
    grid = np.linspace(0.0, cfg.lambda_max, cfg.grid_points + 1)[1:]
    rows = []
    if cfg.kind == "schmidt_walk" or cfg.kind == "eig_langevin":
        dims = theory.BipartiteDims(cfg.n_a, cfg.n_b)
        if cfg.kind == "schmidt_walk":
            wcfg = oracle.SphereWalkConfig(
                n_traj=cfg.n_traj, record_grid=tuple(grid), seed=cfg.seed,
                n_a=cfg.n_a, n_b=cfg.n_b, d_lambda=cfg.d_lambda,
            )
            samples = oracle.sphere_walk(wcfg)
        else:
            lcfg = oracle.EigLangevinConfig(
                n_a=cfg.n_a, n_b=cfg.n_b, n_traj=cfg.n_traj,
                record_grid=tuple(grid), seed=cfg.seed, d_lambda=cfg.d_lambda,
            )
            samples = oracle.eig_langevin(lcfg)
        rows += oracle.moment_check(grid, samples["s2"], theory.avg_s2(dims, grid), "s2")
        rows += oracle.moment_check(grid, samples["s3"], theory.avg_s3(dims, grid), "s3")
        if cfg.n_a == cfg.n_b:
            rows += oracle.variance_check(
                grid, samples["s2"], theory.var_s2_balanced(cfg.n_a, grid), "var_s2"
            )
    elif cfg.kind == "spee_walk":
        side = round(cfg.n_sites ** (1.0 / 3.0))
        mask = entanglement.site_split(side).mask if side ** 3 == cfg.n_sites else (
            np.arange(cfg.n_sites) < cfg.n_sites // 2
        )
        wcfg = oracle.SphereWalkConfig(
            n_traj=cfg.n_traj, record_grid=tuple(grid), seed=cfg.seed,
            mask=mask, d_lambda=cfg.d_lambda,
        )
        samples = oracle.sphere_walk(wcfg)
        n = cfg.n_sites
        rows += oracle.moment_check(grid, samples["p_a"], theory.avg_pa(n, grid), "p_a")
        rows += oracle.moment_check(
            grid, samples["p_a_p_b"], theory.avg_papb(n, grid), "p_a_p_b"
        )
        rows += oracle.variance_check(
            grid, samples["p_a_p_b"], theory.var_papb(n, grid), "var_papb_closed_form"
        )
    elif cfg.kind == "w_moment":
        d_lambda = cfg.d_lambda or 1e-4
        report = oracle.w_moment_step_check(
            cfg.n_a, cfg.n_b, cfg.n_traj, d_lambda, cfg.seed, cfg.epsilon
        )
        for name, r in report.items():
            rows.append(
                {
                    "lambda": d_lambda,
                    "measure": f"w_{name}",
                    "estimate": r["estimate"],
                    "stderr": r["stderr"],
                    "theory": r["target"],
                    "z": r["z"],
                    "flagged": abs(r["z"]) > 4.0,
                }
            )
    path = os.path.join(cfg.out_dir, f"oracle_{cfg.kind}.csv")
    oracle.report_to_csv(rows, path)
    _write_manifest(cfg, [path], os.path.join(cfg.out_dir, f"oracle_{cfg.kind}_manifest.txt"))
    return rows


# ---------------------------------------------------------------------------
# minimal standalone SVG plotting


def svg_line_plot(path, series, title="", xlabel="", ylabel="", width=640, height=440):
    """Write a simple standalone SVG line/point plot.

    ``series`` is a list of dicts with keys x, y, label and style
    ('points', 'line' or 'dashed').
    """
    margin = 60
    xs = np.concatenate([np.asarray(s["x"], dtype=float) for s in series])
    ys = np.concatenate([np.asarray(s["y"], dtype=float) for s in series])
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    def sx(x):
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin)

    def sy(y):
        return height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<text x="{width / 2}" y="{height - 12}" text-anchor="middle" font-size="12">{xlabel}</text>',
        f'<text x="16" y="{height / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {height / 2})">{ylabel}</text>',
        f'<rect x="{margin}" y="{margin}" width="{width - 2 * margin}" '
        f'height="{height - 2 * margin}" fill="none" stroke="black"/>',
    ]
    for i, frac in enumerate(np.linspace(0, 1, 5)):
        xv = x_lo + frac * (x_hi - x_lo)
        yv = y_lo + frac * (y_hi - y_lo)
        parts.append(
            f'<text x="{sx(xv):.1f}" y="{height - margin + 16}" text-anchor="middle" '
            f'font-size="10">{xv:.3g}</text>'
        )
        parts.append(
            f'<text x="{margin - 6}" y="{sy(yv):.1f}" text-anchor="end" '
            f'font-size="10">{yv:.3g}</text>'
        )
    for k, s in enumerate(series):
        color = colors[k % len(colors)]
        x = np.asarray(s["x"], dtype=float)
        y = np.asarray(s["y"], dtype=float)
        style = s.get("style", "line")
        if style == "points":
            for xi, yi in zip(x, y):
                parts.append(f'<circle cx="{sx(xi):.2f}" cy="{sy(yi):.2f}" r="3" fill="{color}"/>')
        else:
            pts = " ".join(f"{sx(xi):.2f},{sy(yi):.2f}" for xi, yi in zip(x, y))
            dash = ' stroke-dasharray="6,4"' if style == "dashed" else ""
            parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}"{dash}/>')
        parts.append(
            f'<text x="{width - margin - 4}" y="{margin + 16 + 14 * k}" text-anchor="end" '
            f'font-size="11" fill="{color}">{s.get("label", "")}</text>'
        )
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
