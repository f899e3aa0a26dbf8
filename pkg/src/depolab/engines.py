"""Stochastic one-step and trajectory evolution for all growth models.

Two interchangeable diffusive engines exist: the walk engine simulates the
explorer's vertical chain (faithful to the process definition), the direct
engine samples from the exact one-step law (the fast default).  Both induce
the same law; the test suite checks this.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Configuration
from .kernels import absorption_profile

MODEL_KINDS = (
    "diffusive-walk",
    "diffusive-direct",
    "ballistic",
    "polya",
    "uniform-allocation",
    "generalized-urn",
)

URN_KINDS = ("polya", "uniform-allocation", "generalized-urn")

RNG_ALGORITHM_ID = "numpy-pcg64"


@dataclass(frozen=True)
class GrowthModel:
    """Selector for one of the growth dynamics.

    ``urn_weight`` holds polynomial coefficients (constant first) of the
    reinforcement weight f for the generalized urn; f(0) must equal 1.
    """

    kind: str
    urn_weight: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind: {self.kind!r}")
        if self.kind == "generalized-urn":
            if not self.urn_weight or self.urn_weight[0] != 1:
                raise ValueError("urn weight polynomial must satisfy f(0) = 1")

    def weight_coeffs(self) -> tuple[float, ...]:
        if self.kind == "polya":
            return (1.0, 1.0)
        if self.kind == "uniform-allocation":
            return (1.0,)
        if self.kind == "generalized-urn":
            return self.urn_weight
        raise ValueError(f"{self.kind} has no urn weight")


QUADRATIC_URN = GrowthModel("generalized-urn", (1.0, 0.0, 1.0))


@dataclass(frozen=True)
class RngStream:
    """Deterministic, platform-independent randomness source.

    Distinct ``stream_id`` values give independent-behaving streams off one
    master seed; ``key`` mixes in extra context (e.g. the system size) so
    grid points do not share draws.
    """

    master_seed: int
    stream_id: int
    key: tuple[int, ...] = ()
    algorithm_id: str = RNG_ALGORITHM_ID

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(
            [self.master_seed, self.stream_id, *self.key]
        )


class LevelSampler:
    """O(1) uniform sampling among the columns reaching a given level.

    Keeps a permutation of column ids ordered by non-increasing height, so
    the columns of height >= j always occupy a prefix whose length equals
    the level count zeta_j.  Incrementing a column swaps it to the boundary
    of its height group.
    """

    def __init__(self, heights) -> None:
        h = np.asarray(heights, dtype=np.int64)
        self.n = int(h.size)
        self.heights = h.copy()
        order = np.argsort(-h, kind="stable")
        self.ids = order.astype(np.int64)
        self.positions = np.empty(self.n, dtype=np.int64)
        self.positions[order] = np.arange(self.n)
        m = int(h.max()) if self.n else 0
        # boundaries[j] = zeta_j for j >= 1; index 0 unused, list grows with max
        self.boundaries = [self.n] + [
            int((h >= j).sum()) for j in range(1, m + 1)
        ]
        self.max_height = m

    def count_at(self, j: int) -> int:
        """zeta_j: number of columns of height >= j."""
        if j >= len(self.boundaries):
            return 0
        return self.boundaries[j]

    def counts(self) -> np.ndarray:
        """zeta_1 .. zeta_M as an array."""
        return np.asarray(self.boundaries[1:], dtype=np.int64)

    def sample(self, j: int, rng: np.random.Generator) -> int:
        """Uniform column among those of height >= j."""
        c = self.boundaries[j]
        return int(self.ids[rng.integers(c)])

    def increment(self, col: int) -> None:
        h = int(self.heights[col])
        new = h + 1
        if new > self.max_height:
            self.boundaries.append(0)
            self.max_height = new
        # swap col with the first element of its height group
        b = self.boundaries[new]
        p = self.positions[col]
        other = self.ids[b]
        self.ids[b], self.ids[p] = col, other
        self.positions[col], self.positions[other] = b, p
        self.boundaries[new] = b + 1
        self.heights[col] = new


class FenwickWeights:
    """Prefix-sum tree over per-column weights with log-time updates."""

    def __init__(self, weights) -> None:
        w = np.asarray(weights, dtype=np.float64)
        self.n = int(w.size)
        self.tree = np.zeros(self.n + 1)
        for i, v in enumerate(w):
            self.add(i, float(v))

    def add(self, i: int, delta: float) -> None:
        j = i + 1
        while j <= self.n:
            self.tree[j] += delta
            j += j & (-j)

    def total(self) -> float:
        j = self.n
        s = 0.0
        while j > 0:
            s += self.tree[j]
            j -= j & (-j)
        return s

    def search(self, target: float) -> int:
        """Smallest index i with prefix_sum(0..i) > target."""
        pos = 0
        bit = 1 << (self.n.bit_length())
        while bit:
            nxt = pos + bit
            if nxt <= self.n and self.tree[nxt] <= target:
                target -= self.tree[nxt]
                pos = nxt
            bit >>= 1
        return min(pos, self.n - 1)


class _DepositionEngine:
    """Shared state for the three deposition engines (single-writer)."""

    def __init__(self, n: int, rng: np.random.Generator, heights=None) -> None:
        self.n = n
        self.rng = rng
        init = np.zeros(n, dtype=np.int64) if heights is None else heights
        self.sampler = LevelSampler(init)

    @property
    def heights(self) -> np.ndarray:
        return self.sampler.heights

    def configuration(self) -> Configuration:
        return Configuration(self.sampler.heights)

    def attach(self, col: int) -> None:
        self.sampler.increment(col)

    def draw_column(self) -> int:
        raise NotImplementedError

    def draw_columns(self, k: int) -> np.ndarray:
        return np.array([self.draw_column() for _ in range(k)], dtype=np.int64)

    def step(self) -> int:
        col = self.draw_column()
        self.attach(col)
        return col


class DiffusiveWalkEngine(_DepositionEngine):
    """Simulates the explorer's vertical chain arrival by arrival.

    The walk starts one unit above the top of the cluster; excursions above
    the top collapse instantly back onto it, which is exact because nothing
    absorbs up there and the vertical walk returns with probability 1.
    """

    def draw_column(self) -> int:
        s = self.sampler
        rng = self.rng
        n = self.n
        z = s.max_height
        b = s.boundaries
        while z > 0:
            if rng.random() * n < b[z]:
                return s.sample(z, rng)
            z += 1 if rng.random() < 0.5 else -1
            if z > s.max_height:
                z = s.max_height
        return int(rng.integers(n))


class DiffusiveDirectEngine(_DepositionEngine):
    """Samples the attachment height from the exact absorption profile.

    The profile is cached until the configuration changes; per step this
    costs one tridiagonal solve in the current maximal height.
    """

    def __init__(self, n, rng, heights=None) -> None:
        super().__init__(n, rng, heights)
        self._cum_masses: np.ndarray | None = None

    def attach(self, col: int) -> None:
        super().attach(col)
        self._cum_masses = None

    def _cumulative(self) -> np.ndarray:
        if self._cum_masses is None:
            prof = absorption_profile(self.sampler.counts(), self.n)
            self._cum_masses = np.cumsum(prof.masses)
        return self._cum_masses

    def _column_at(self, h: int) -> int:
        if h == 0:
            return int(self.rng.integers(self.n))
        return self.sampler.sample(h, self.rng)

    def draw_column(self) -> int:
        cum = self._cumulative()
        h = int(np.searchsorted(cum, self.rng.random(), side="right"))
        return self._column_at(min(h, cum.size - 1))

    def draw_columns(self, k: int) -> np.ndarray:
        cum = self._cumulative()
        hs = np.searchsorted(cum, self.rng.random(k), side="right")
        np.clip(hs, 0, cum.size - 1, out=hs)
        return np.array([self._column_at(int(h)) for h in hs], dtype=np.int64)


class BallisticEngine(_DepositionEngine):
    """Straight-down explorer: per-level Bernoulli captures during descent."""

    def draw_column(self) -> int:
        s = self.sampler
        m = s.max_height
        if m == 0:
            return int(self.rng.integers(self.n))
        probs = s.counts() / self.n  # levels 1..m
        u = self.rng.random(m)
        hits = u[::-1] < probs[::-1]  # scan from the top level down
        idx = np.flatnonzero(hits)
        if idx.size == 0:
            return int(self.rng.integers(self.n))
        h = m - int(idx[0])
        return s.sample(h, self.rng)


class UrnEngine:
    """Reinforcement draws with weight f(count); covers Polya, uniform
    allocation and generalized urns through the weight polynomial."""

    def __init__(self, model: GrowthModel, n: int, rng: np.random.Generator,
                 heights=None) -> None:
        if model.kind not in URN_KINDS:
            raise ValueError(f"{model.kind} is not an urn model")
        self.model = model
        self.n = n
        self.rng = rng
        self.heights = (
            np.zeros(n, dtype=np.int64) if heights is None
            else np.asarray(heights, dtype=np.int64).copy()
        )
        self._coeffs = model.weight_coeffs()
        self.weights = FenwickWeights([self._f(int(h)) for h in self.heights])

    def _f(self, x: int) -> float:
        v = 0.0
        for c in reversed(self._coeffs):
            v = v * x + c
        return v

    def configuration(self) -> Configuration:
        return Configuration(self.heights)

    def draw_column(self) -> int:
        return self.weights.search(self.rng.random() * self.weights.total())

    def attach(self, col: int) -> None:
        old = int(self.heights[col])
        self.heights[col] = old + 1
        self.weights.add(col, self._f(old + 1) - self._f(old))

    def step(self) -> int:
        col = self.draw_column()
        self.attach(col)
        return col


def make_engine(model: GrowthModel, n: int, stream: RngStream, heights=None):
    """Build the engine for a model with its own generator (single-writer)."""
    rng = stream.generator()
    if model.kind == "diffusive-walk":
        return DiffusiveWalkEngine(n, rng, heights)
    if model.kind == "diffusive-direct":
        return DiffusiveDirectEngine(n, rng, heights)
    if model.kind == "ballistic":
        return BallisticEngine(n, rng, heights)
    return UrnEngine(model, n, rng, heights)


@dataclass
class TrajectoryFrame:
    """Observables recorded at one scheduled time."""

    t: int
    max_height: int
    second_height: int
    total: int
    census: dict[str, int] = field(default_factory=dict)
    top_capture: float = 0.0


def _record_frame(t, heights, attachments, census_thresholds) -> TrajectoryFrame:
    order = np.sort(heights)
    mx = int(order[-1])
    second = int(order[-2]) if order.size > 1 else 0
    census = {
        label: int((heights > thr).sum()) for label, thr in census_thresholds
    }
    window = max(1, t // 10)  # trailing 10% of elapsed time
    if t > 0:
        top_col = int(np.argmax(heights))
        recent = attachments[max(0, t - window):t]
        capture = float(np.mean(np.asarray(recent) == top_col))
    else:
        capture = 0.0
    return TrajectoryFrame(t, mx, second, int(heights.sum()), census, capture)


def run_trajectory(
    model: GrowthModel,
    n: int,
    steps: int,
    stream: RngStream,
    record_times=(),
    census_thresholds=(),
) -> list[TrajectoryFrame]:
    """Evolve from the flat-zero configuration and record scheduled frames.

    ``record_times`` is any iterable of deposition counts (0 allowed);
    ``census_thresholds`` is a sequence of (label, threshold) pairs.
    Deterministic given (model, n, steps, stream).
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    engine = make_engine(model, n, stream)
    times = sorted({int(t) for t in record_times if 0 <= int(t) <= steps})
    census = list(census_thresholds)
    frames: list[TrajectoryFrame] = []
    attachments: list[int] = []
    ti = 0
    if ti < len(times) and times[ti] == 0:
        frames.append(_record_frame(0, engine.heights, attachments, census))
        ti += 1
    for t in range(1, steps + 1):
        attachments.append(engine.step())
        if ti < len(times) and times[ti] == t:
            frames.append(
                _record_frame(t, engine.heights, attachments, census)
            )
            ti += 1
    return frames
