"""Post-processing: rank statistics, run aggregation, and plot emission."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def _ranks(values: np.ndarray) -> np.ndarray:
    """Average ranks (1-based), ties shared."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(a, b) -> float:
    """Spearman rank correlation with average-rank tie handling."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("inputs must be equal-length 1-d arrays")
    ra, rb = _ranks(a), _ranks(b)
    ra -= ra.mean()
    rb -= rb.mean()
    denom = np.sqrt((ra @ ra) * (rb @ rb))
    if denom == 0.0:
        return 0.0
    return float((ra @ rb) / denom)


# -- cross-seed curve aggregation ------------------------------------------


@dataclass
class CurveSummary:
    """Mean and population std of episode return per env-step bucket."""

    bucket_start: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    n_runs: int
    bucket_size: int

    def __post_init__(self) -> None:
        if len(self.bucket_start) == 0:
            raise ValueError("summary has no buckets")
        if np.any(np.diff(self.bucket_start) <= 0):
            raise ValueError("bucket starts must increase")
        if np.any(self.std < 0):
            raise ValueError("negative std")


def read_metrics(path: str) -> dict:
    """Parse one metrics CSV: leading '# key=value' comment, column header,
    then one row per episode."""
    meta: dict[str, str] = {}
    rows = []
    with open(path) as fh:
        header = None
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if "=" in tok:
                        k, v = tok.split("=", 1)
                        meta[k] = v
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append(line.split(","))
    if header is None:
        raise ValueError(f"{path}: missing column header")
    cols = {name: i for i, name in enumerate(header)}
    for needed in ("env_steps", "return"):
        if needed not in cols:
            raise ValueError(f"{path}: missing column {needed!r}")
    env_steps = np.array([int(r[cols["env_steps"]]) for r in rows], dtype=np.int64)
    returns = np.array([float(r[cols["return"]]) for r in rows])
    out = {"env": meta.get("env"), "agent": meta.get("agent"),
           "env_steps": env_steps, "return": returns}
    if "success" in cols:
        out["success"] = np.array([float(r[cols["success"]]) for r in rows])
    return out


def _bucket_curve(env_steps: np.ndarray, values: np.ndarray,
                  bucket_size: int, n_buckets: int) -> np.ndarray:
    """Per-bucket mean of ``values``; empty buckets after the first episode
    carry the previous bucket forward; buckets before it hold NaN."""
    out = np.full(n_buckets, np.nan)
    if len(env_steps) == 0:
        return out
    idx = np.minimum(env_steps // bucket_size, n_buckets - 1)
    sums = np.zeros(n_buckets)
    counts = np.zeros(n_buckets)
    np.add.at(sums, idx, values)
    np.add.at(counts, idx, 1.0)
    filled = counts > 0
    out[filled] = sums[filled] / counts[filled]
    last = np.nan
    for b in range(n_buckets):
        if math.isnan(out[b]):
            out[b] = last
        else:
            last = out[b]
    return out


def aggregate(metrics_paths: list[str], bucket_size: int,
              column: str = "return") -> CurveSummary:
    """Cross-seed curve: per-bucket mean and population std of ``column``.

    Each run is bucketed by cumulative env steps with empty buckets carried
    forward; a bucket's statistics pool the runs that have reached it.
    The result is order-independent in ``metrics_paths``.
    """
    if bucket_size <= 0:
        raise ValueError("bucket_size must be positive")
    if not metrics_paths:
        raise ValueError("no runs to aggregate")
    runs = [read_metrics(p) for p in metrics_paths]
    envs = {r["env"] for r in runs if r["env"] is not None}
    if len(envs) > 1:
        raise ValueError(f"runs mix environments: {sorted(envs)}")
    if all(len(r["env_steps"]) == 0 for r in runs):
        raise ValueError("all runs are empty")
    for r in runs:
        if column not in r:
            raise ValueError(f"missing column {column!r}")
    max_steps = max(int(r["env_steps"][-1]) for r in runs if len(r["env_steps"]))
    n_buckets = max_steps // bucket_size + 1
    curves = np.stack([
        _bucket_curve(r["env_steps"], r[column], bucket_size, n_buckets)
        for r in runs
    ])
    have = ~np.isnan(curves)
    keep = have.any(axis=0)
    first = int(np.argmax(keep))
    curves = curves[:, first:]
    have = have[:, first:]
    # canonical per-bucket order (NaN last) so the float reductions do not
    # depend on the order runs were passed in
    curves = np.sort(curves, axis=0)
    have = np.sort(have, axis=0)[::-1]
    counts = have.sum(axis=0)
    filled = np.where(np.isnan(curves), 0.0, curves)
    mean = filled.sum(axis=0) / counts
    var = (np.where(np.isnan(curves), 0.0, (filled - mean) ** 2)).sum(axis=0) / counts
    var[var < 0] = 0.0
    starts = (np.arange(first, n_buckets) * bucket_size).astype(np.int64)
    return CurveSummary(bucket_start=starts, mean=mean,
                        std=np.sqrt(var), n_runs=len(runs),
                        bucket_size=bucket_size)


def emit_plot_data(summary: CurveSummary, csv_path: str,
                   svg_path: str | None = None) -> None:
    """Write the curve as CSV and, optionally, a standalone SVG line chart
    with a one-standard-deviation band."""
    with open(csv_path, "w") as fh:
        fh.write(f"# population std (divide by n) over {summary.n_runs} runs\n")
        fh.write("bucket_start,mean,std\n")
        for b, m, s in zip(summary.bucket_start, summary.mean, summary.std):
            fh.write(f"{int(b)},{m:.10g},{s:.10g}\n")
    if svg_path is not None:
        with open(svg_path, "w") as fh:
            fh.write(curve_svg(summary))


def curve_svg(summary: CurveSummary, width: int = 640, height: int = 400) -> str:
    """Plain SVG: shaded mean±std band under the mean polyline."""
    margin = 50
    xs = summary.bucket_start.astype(float)
    lo = summary.mean - summary.std
    hi = summary.mean + summary.std
    x0, x1 = float(xs[0]), float(xs[-1])
    y0, y1 = float(lo.min()), float(hi.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    inner_w = width - 2 * margin
    inner_h = height - 2 * margin

    def px(x: float) -> float:
        return margin + (x - x0) / (x1 - x0) * inner_w

    def py(y: float) -> float:
        return height - margin - (y - y0) / (y1 - y0) * inner_h

    def pts(xv, yv) -> str:
        return " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xv, yv))

    band = pts(xs, hi) + " " + pts(xs[::-1], lo[::-1])
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<polygon points="{band}" fill="#7b9fd4" fill-opacity="0.35" stroke="none"/>',
        f'<polyline points="{pts(xs, summary.mean)}" fill="none" '
        f'stroke="#1f4e96" stroke-width="2"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<text x="{margin}" y="{height - margin + 20}" font-size="12">{int(x0)}</text>',
        f'<text x="{width - margin}" y="{height - margin + 20}" font-size="12" '
        f'text-anchor="end">{int(x1)}</text>',
        f'<text x="{margin - 8}" y="{height - margin}" font-size="12" '
        f'text-anchor="end">{y0 + pad:.3g}</text>',
        f'<text x="{margin - 8}" y="{margin + 4}" font-size="12" '
        f'text-anchor="end">{y1 - pad:.3g}</text>',
        f'<text x="{width // 2}" y="{height - 12}" font-size="13" '
        f'text-anchor="middle">env steps</text>',
        "</svg>",
    ]
    return "\n".join(parts)


# -- spatial fields ----------------------------------------------------------


def sd_to_anchor_field(env, psi: np.ndarray, anchor) -> np.ndarray:
    """Grid of successor distances from each open cell to ``anchor``;
    walls are NaN.  Uses the nothing-collected slice of the state space."""
    anchor_idx = env.cell_index[anchor]
    anchor_row = psi[env.state_id(anchor_idx)]
    grid = np.full((env.spec.height, env.spec.width), np.nan)
    for i, (x, y) in enumerate(env.cells):
        row = psi[env.state_id(i)]
        grid[y, x] = float(np.linalg.norm(row - anchor_row))
    return grid


def sfc_field(env, psi: np.ndarray) -> np.ndarray:
    """Grid of the mean one-step squared successor distance over each open
    cell's actions; walls and terminal cells are NaN."""
    sums = np.zeros(env.n_cells)
    counts = np.zeros(env.n_cells)
    for i, j in env.transition_pairs():
        d = psi[env.state_id(i)] - psi[env.state_id(j)]
        sums[i] += float(d @ d)
        counts[i] += 1.0
    grid = np.full((env.spec.height, env.spec.width), np.nan)
    for i, (x, y) in enumerate(env.cells):
        if counts[i] > 0:
            grid[y, x] = sums[i] / counts[i]
    return grid


def write_heatmap_csv(path: str, grid: np.ndarray) -> None:
    """Rows x,y,value for every finite grid entry, scanned row-major."""
    with open(path, "w") as fh:
        fh.write("x,y,value\n")
        for y in range(grid.shape[0]):
            for x in range(grid.shape[1]):
                v = grid[y, x]
                if not math.isnan(v):
                    fh.write(f"{x},{y},{v:.10g}\n")


def write_pgm(path: str, grid: np.ndarray) -> None:
    """ASCII PGM render: finite values scaled to 25..255, NaN (walls,
    terminals) black."""
    finite = grid[~np.isnan(grid)]
    if finite.size == 0:
        raise ValueError("grid has no finite values")
    lo, hi = float(finite.min()), float(finite.max())
    span = hi - lo if hi > lo else 1.0
    h, w = grid.shape
    lines = [f"P2 {w} {h} 255"]
    for y in range(h):
        row = []
        for x in range(w):
            v = grid[y, x]
            if math.isnan(v):
                row.append(0)
            else:
                row.append(25 + int(round((v - lo) / span * 230)))
        lines.append(" ".join(str(p) for p in row))
    text = "\n".join(lines) + "\n"
    with open(path, "w") as fh:
        fh.write(text)
