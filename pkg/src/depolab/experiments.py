"""Experiment harness: growth datasets, regression fits, onset detection.

Realizations fan out across workers, each on its own derived stream; the
aggregation is a deterministic fold ordered by (n, realization), so output
never depends on the worker count.
"""
from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass
from multiprocessing import get_context

import numpy as np

from .engines import (
    RNG_ALGORITHM_ID,
    GrowthModel,
    RngStream,
    TrajectoryFrame,
    run_trajectory,
)

TOOL_VERSION = "0.1.0"

FRAMES_HEADER = (
    "model,n,seed,stream,t,max_height,second_height,total,"
    "census_label,census_count,top_capture"
)

SUMMARY_HEADER = "model,n,t,realizations,mean_max_height,se_max_height"


def fmt(x: float) -> str:
    """Canonical 12-significant-digit number formatting ('.' separator)."""
    return f"{x:.12g}"


def schedule_times(n: int, spec) -> list[int]:
    """Resolve a schedule expression to concrete deposition counts.

    ``lin:c`` -> round(c*n); ``crit:c`` -> round(c*n/ln n); an iterable of
    integers passes through.  A comma-separated string may combine several
    expressions.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    if isinstance(spec, str):
        parts = [p.strip() for p in spec.split(",") if p.strip()]
        times = []
        for part in parts:
            if part.startswith("lin:"):
                t = round(float(part[4:]) * n)
            elif part.startswith("crit:"):
                t = round(float(part[5:]) * n / math.log(n))
            else:
                t = int(part)
            if t <= 0:
                raise ValueError(f"schedule entry {part!r} resolves to {t} <= 0")
            times.append(int(t))
        return sorted(set(times))
    times = [int(t) for t in spec]
    if any(t <= 0 for t in times):
        raise ValueError("schedule entries must be positive")
    return sorted(set(times))


def census_thresholds(n: int, spec: str) -> list[tuple[str, int]]:
    """Resolve census thresholds: ``gamma-log:1,2`` or ``abs:5,10``."""
    if not spec:
        return []
    kind, _, values = spec.partition(":")
    out = []
    for v in values.split(","):
        v = v.strip()
        if not v:
            continue
        if kind == "gamma-log":
            thr = float(v) * math.log(n)
            out.append((f"gamma-log:{v}", int(math.floor(thr))))
        elif kind == "abs":
            out.append((f"abs:{v}", int(v)))
        else:
            raise ValueError(f"unknown census kind {kind!r}")
    return out


@dataclass
class FrameRow:
    """One frames-CSV row (one census label per row)."""

    model: str
    n: int
    seed: int
    stream: int
    frame: TrajectoryFrame
    census_label: str
    census_count: int

    def as_csv(self) -> str:
        f = self.frame
        return ",".join(
            [
                self.model,
                str(self.n),
                str(self.seed),
                str(self.stream),
                str(f.t),
                str(f.max_height),
                str(f.second_height),
                str(f.total),
                self.census_label,
                str(self.census_count),
                fmt(f.top_capture),
            ]
        )


def _one_realization(args):
    model, n, steps, seed, realization, times, census = args
    stream = RngStream(seed, realization, key=(n,))
    frames = run_trajectory(
        model, n, steps, stream, record_times=times, census_thresholds=census
    )
    rows = []
    for fr in frames:
        labels = list(fr.census.items()) or [("-", 0)]
        for label, count in labels:
            rows.append(
                FrameRow(model.kind, n, seed, realization, fr, label, count)
            )
    return rows


def growth_experiment(
    model: GrowthModel,
    n_values,
    schedule,
    realizations: int,
    seed: int,
    census_spec: str = "gamma-log:1",
    workers: int = 1,
) -> list[FrameRow]:
    """Run the trajectory grid and return frame rows in deterministic order."""
    if realizations < 1:
        raise ValueError("realizations must be >= 1")
    tasks = []
    for n in n_values:
        times = schedule_times(n, schedule)
        census = census_thresholds(n, census_spec)
        steps = max(times) if times else 0
        for r in range(realizations):
            tasks.append((model, n, steps, seed, r, times, census))
    if workers > 1:
        ctx = get_context("spawn")
        with ctx.Pool(workers) as pool:
            chunks = pool.map(_one_realization, tasks)
    else:
        chunks = [_one_realization(t) for t in tasks]
    rows: list[FrameRow] = []
    for chunk in chunks:  # task order == fold order, worker-count independent
        rows.extend(chunk)
    return rows


def summarize(rows: list[FrameRow]):
    """Mean and standard error of max height per (model, n, t)."""
    groups: dict[tuple[str, int, int], dict[int, int]] = {}
    for row in rows:
        key = (row.model, row.n, row.frame.t)
        groups.setdefault(key, {})[row.stream] = row.frame.max_height
    out = []
    for (model, n, t) in sorted(groups, key=lambda k: (k[0], k[1], k[2])):
        vals = np.array(
            [groups[(model, n, t)][s] for s in sorted(groups[(model, n, t)])],
            dtype=np.float64,
        )
        mean = float(vals.mean())
        se = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
        out.append((model, n, t, int(vals.size), mean, se))
    return out


def write_frames_csv(rows: list[FrameRow], path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(FRAMES_HEADER + "\n")
        for row in rows:
            fh.write(row.as_csv() + "\n")


def write_summary_csv(rows: list[FrameRow], path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for model, n, t, k, mean, se in summarize(rows):
            fh.write(f"{model},{n},{t},{k},{fmt(mean)},{fmt(se)}\n")


def write_metadata(path: str, model: GrowthModel, n_values, schedule,
                   realizations: int, seed: int, census_spec: str) -> None:
    meta = {
        "tool_version": TOOL_VERSION,
        "rng_algorithm_id": RNG_ALGORITHM_ID,
        "master_seed": seed,
        "model": model.kind,
        "urn_weight": list(model.urn_weight),
        "n_values": list(n_values),
        "schedule": schedule,
        "realizations": realizations,
        "census": census_spec,
    }
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_frames_csv(path: str) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        expected = FRAMES_HEADER.split(",")
        if reader.fieldnames != expected:
            raise ValueError(
                f"unexpected frames CSV header: {reader.fieldnames}"
            )
        return list(reader)


@dataclass
class FitResult:
    kind: str  # "power-law" or "logarithmic"
    amplitude: float
    exponent_or_slope: float
    r_squared: float


def _least_squares(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    sxy = float(((x - xm) * (y - ym)).sum())
    slope = sxy / sxx
    intercept = ym - slope * xm
    resid = y - (slope * x + intercept)
    sst = float(((y - ym) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / sst if sst > 0 else 1.0
    return slope, intercept, r2


def fit_power_law(points) -> FitResult:
    """Least squares of log y against log N; amplitude = exp(intercept)."""
    pts = [(float(n), float(y)) for n, y in points]
    if len(pts) < 3:
        raise ValueError("need at least 3 points")
    if any(y <= 0 or n <= 0 for n, y in pts):
        raise ValueError("power-law fit requires positive values")
    x = np.log(np.array([n for n, _ in pts]))
    y = np.log(np.array([v for _, v in pts]))
    slope, intercept, r2 = _least_squares(x, y)
    return FitResult("power-law", math.exp(intercept), slope, r2)


def fit_logarithmic(points) -> FitResult:
    """Least squares of y against ln N (with intercept); slope reported."""
    pts = [(float(n), float(y)) for n, y in points]
    if len(pts) < 3:
        raise ValueError("need at least 3 points")
    x = np.log(np.array([n for n, _ in pts]))
    y = np.array([v for _, v in pts])
    slope, intercept, r2 = _least_squares(x, y)
    return FitResult("logarithmic", intercept, slope, r2)


def points_at(rows, at_expr: str, model: str | None = None):
    """Mean max height per n at the time the expression resolves to.

    Accepts FrameRow objects or frames-CSV dicts; duplicate census rows per
    (n, stream, t) are collapsed before averaging.
    """
    seen: dict[tuple[int, int, int], int] = {}
    for row in rows:
        if isinstance(row, FrameRow):
            rmodel, n, stream = row.model, row.n, row.stream
            t, mx = row.frame.t, row.frame.max_height
        else:
            rmodel, n, stream = row["model"], int(row["n"]), int(row["stream"])
            t, mx = int(row["t"]), int(row["max_height"])
        if model is not None and rmodel != model:
            continue
        seen[(n, stream, t)] = mx
    ns = sorted({n for n, _, _ in seen})
    points = []
    for n in ns:
        targets = set(schedule_times(n, at_expr))
        vals = [
            mx for (nn, _, t), mx in seen.items() if nn == n and t in targets
        ]
        if vals:
            points.append((n, float(np.mean(vals))))
    return points


def monopoly_onset(frames: list[TrajectoryFrame], threshold: float = 0.9):
    """First recorded time at which the top pile captures at least the
    threshold fraction of the trailing window, or None."""
    for fr in frames:
        if fr.t > 0 and fr.top_capture >= threshold:
            return fr.t
    return None


def tail_bound_check(
    n: int, horizon: int, realizations: int, seed: int,
    multipliers=(2, 3, 4, 6),
) -> dict:
    """Distribution of the ballistic max height at the horizon, with the
    fraction of realizations exceeding c*ln(n) for each multiplier."""
    model = GrowthModel("ballistic")
    maxima = []
    for r in range(realizations):
        stream = RngStream(seed, r, key=(n,))
        frames = run_trajectory(model, n, horizon, stream,
                                record_times=[horizon])
        maxima.append(frames[-1].max_height if frames else 0)
    arr = np.array(maxima, dtype=np.float64)
    logn = math.log(n)
    return {
        "n": n,
        "horizon": horizon,
        "realizations": realizations,
        "mean_max_height": float(arr.mean()),
        "max_max_height": int(arr.max()),
        "exceedance": {
            str(c): float((arr > c * logn).mean()) for c in multipliers
        },
    }
