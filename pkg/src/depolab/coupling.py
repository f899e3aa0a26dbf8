"""Ordered-configuration algebra and the shared-uniform coupling.

Several growth processes are driven by one uniform draw per step; when the
law of the more monopolistic process prefix-dominates the law of the less
monopolistic one at every step, the dominance order is preserved
deterministically.  Violations abort with a diagnostic, since the whole
point is that there are none.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import Configuration, monopolistic_ge

LAW_NORMALIZATION_TOL = 1e-9


class DominanceViolation(AssertionError):
    """A coupled step broke the monopolistic order."""


class OrderedConfig:
    """Non-increasing height vector (a representative of the sorted state)."""

    __slots__ = ("heights", "total")

    def __init__(self, heights) -> None:
        h = np.asarray(heights, dtype=np.int64)
        if h.size and (np.diff(h) > 0).any():
            raise ValueError("heights must be non-increasing")
        self.heights = h
        self.total = int(h.sum())

    @classmethod
    def zero(cls, n: int) -> "OrderedConfig":
        return cls(np.zeros(n, dtype=np.int64))

    @property
    def n(self) -> int:
        return int(self.heights.size)

    def to_configuration(self) -> Configuration:
        return Configuration(self.heights)

    def __repr__(self) -> str:  # pragma: no cover
        return f"OrderedConfig({self.heights.tolist()})"


def increase_positions(o: OrderedConfig) -> set[int]:
    """Positions (1-based) where a unit can land without breaking the order:
    1 plus every strict descent."""
    h = o.heights
    out = {1}
    out.update(int(i) + 1 for i in np.flatnonzero(h[:-1] > h[1:]) + 1)
    return out


def drop_position(o: OrderedConfig, j: int) -> int:
    """Last strict-descent position up to j (1-based): where a unit added at
    position j actually lands after re-sorting."""
    if not 1 <= j <= o.n:
        raise ValueError(f"position {j} out of range 1..{o.n}")
    h = o.heights
    d = 1
    for i in range(2, j + 1):
        if h[i - 2] > h[i - 1]:
            d = i
    return d


def add_and_reorder(o: OrderedConfig, j: int) -> OrderedConfig:
    """Ordered result of adding one unit at position j."""
    d = drop_position(o, j)
    h = o.heights.copy()
    h[d - 1] += 1
    return OrderedConfig(h)


def polya_law(o: OrderedConfig) -> np.ndarray:
    """Reinforcement law (h_i + 1)/(N + |h|) on ordered positions."""
    return (o.heights + 1.0) / (o.n + o.total)


def uniform_law(o: OrderedConfig) -> np.ndarray:
    return np.full(o.n, 1.0 / o.n)


def prefix_dominance(p: np.ndarray, q: np.ndarray) -> bool:
    """True iff every prefix sum of q weakly dominates that of p."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.size != q.size:
        raise ValueError("arrays must have equal length")
    return bool((np.cumsum(q) >= np.cumsum(p) - 1e-12).all())


def ratio_condition(p: np.ndarray, q: np.ndarray) -> bool:
    """True iff q_i/p_i is non-increasing; implies prefix dominance of q."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.size != q.size:
        raise ValueError("arrays must have equal length")
    if (p <= 0).any() or (q <= 0).any():
        raise ValueError("entries must be positive")
    for arr in (p, q):
        if abs(arr.sum() - 1.0) > LAW_NORMALIZATION_TOL:
            raise ValueError("arrays must sum to 1")
    r = q / p
    return bool((np.diff(r) <= 1e-12).all())


def select_index(law: np.ndarray, u: float) -> int:
    """Position (1-based) whose half-open cumulative interval contains u."""
    cum = np.cumsum(law)
    if abs(cum[-1] - 1.0) > LAW_NORMALIZATION_TOL:
        raise ValueError(f"law is not normalized: sum = {cum[-1]!r}")
    j = int(np.searchsorted(cum, u, side="right")) + 1
    return min(j, law.size)


@dataclass
class CoupledProcess:
    label: str
    law: Callable[[OrderedConfig], np.ndarray]
    state: OrderedConfig


@dataclass
class StepRecord:
    t: int
    u: float
    indices: list[int]
    hypothesis_ok: list[bool]
    dominates: list[bool]


@dataclass
class CoupledRun:
    """Processes ordered least-monopolistic first, evolved on shared draws."""

    processes: list[CoupledProcess]
    t: int = 0
    history: list[StepRecord] = field(default_factory=list)

    @classmethod
    def from_laws(cls, labeled_laws, n: int) -> "CoupledRun":
        procs = [
            CoupledProcess(label, law, OrderedConfig.zero(n))
            for label, law in labeled_laws
        ]
        return cls(procs)

    def step(self, u: float) -> StepRecord:
        if not 0.0 <= u < 1.0:
            raise ValueError("u must lie in [0, 1)")
        laws = [p.law(p.state) for p in self.processes]
        indices = [select_index(law, u) for law in laws]
        hyp = []
        for k in range(len(self.processes) - 1):
            # lower process law vs upper process law, prefix-wise
            hyp.append(prefix_dominance(laws[k], laws[k + 1]))
            if hyp[-1] and indices[k] < indices[k + 1]:
                raise DominanceViolation(
                    "selected index decreased along the chain despite the "
                    f"prefix hypothesis at t={self.t}, u={u}: "
                    f"{[p.state.heights.tolist() for p in self.processes]}"
                )
        for proc, j in zip(self.processes, indices):
            proc.state = add_and_reorder(proc.state, j)
        dom = []
        for k in range(len(self.processes) - 1):
            ok = monopolistic_ge(
                self.processes[k + 1].state.to_configuration(),
                self.processes[k].state.to_configuration(),
            )
            dom.append(ok)
            if not ok:
                raise DominanceViolation(
                    f"dominance broken between {self.processes[k].label} and "
                    f"{self.processes[k + 1].label} at t={self.t + 1}, u={u}: "
                    f"{self.processes[k].state.heights.tolist()} vs "
                    f"{self.processes[k + 1].state.heights.tolist()}"
                )
        self.t += 1
        rec = StepRecord(self.t, u, indices, hyp, dom)
        self.history.append(rec)
        return rec

    def run(self, horizon: int, rng: np.random.Generator) -> None:
        for _ in range(horizon):
            self.step(float(rng.random()))
