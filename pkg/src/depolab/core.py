"""Column configurations, height occupations, and the monopolistic order.

Shared vocabulary for the exact kernels, the stochastic engines and the
coupling machinery.  Heights are stored as 64-bit integers so a monopoly
pile can grow to ~N*T without overflow.
"""
from __future__ import annotations

import numpy as np


class MassMismatchError(ValueError):
    """Comparing configurations with different total mass or column count."""


class Configuration:
    """Column-height state of the cluster.

    ``heights[i]`` is the height of column ``i`` (0-based); ``total`` is the
    number of deposited units and ``max_height`` the tallest column.
    """

    __slots__ = ("n", "heights", "total", "max_height")

    def __init__(self, heights) -> None:
        h = np.asarray(heights, dtype=np.int64)
        if h.ndim != 1 or h.size < 1:
            raise ValueError("heights must be a non-empty 1-d sequence")
        if (h < 0).any():
            raise ValueError("heights must be non-negative")
        self.heights = h
        self.n = int(h.size)
        self.total = int(h.sum())
        self.max_height = int(h.max())

    @classmethod
    def zero(cls, n: int) -> "Configuration":
        return cls(np.zeros(n, dtype=np.int64))

    @classmethod
    def from_csv_row(cls, row: str) -> "Configuration":
        """Parse the serialized form ``n,h1,h2,...,hN``."""
        parts = [p.strip() for p in row.strip().split(",")]
        if len(parts) < 2:
            raise ValueError(f"malformed configuration row: {row!r}")
        try:
            n = int(parts[0])
            heights = [int(p) for p in parts[1:]]
        except ValueError as exc:
            raise ValueError(f"malformed configuration row: {row!r}") from exc
        if len(heights) != n:
            raise ValueError(
                f"configuration row declares n={n} but carries {len(heights)} heights"
            )
        return cls(heights)

    def to_csv_row(self) -> str:
        return ",".join([str(self.n)] + [str(int(h)) for h in self.heights])

    def __repr__(self) -> str:  # pragma: no cover
        return f"Configuration(n={self.n}, heights={self.heights.tolist()})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Configuration)
            and self.n == other.n
            and bool(np.array_equal(self.heights, other.heights))
        )


class HeightOccupation:
    """Level census of a configuration.

    ``counts[j-1]`` is the number of columns of height at least ``j``, for
    ``j = 1 .. max_height``.  Empty for the flat-zero configuration.
    """

    __slots__ = ("counts",)

    def __init__(self, counts) -> None:
        self.counts = np.asarray(counts, dtype=np.int64)

    def __len__(self) -> int:
        return int(self.counts.size)

    def __eq__(self, other) -> bool:
        return isinstance(other, HeightOccupation) and bool(
            np.array_equal(self.counts, other.counts)
        )

    def __repr__(self) -> str:  # pragma: no cover
        return f"HeightOccupation({self.counts.tolist()})"


class OrderedView:
    """Heights sorted in non-increasing order, ties broken by column index."""

    __slots__ = ("sorted_heights", "permutation")

    def __init__(self, sorted_heights, permutation) -> None:
        self.sorted_heights = np.asarray(sorted_heights, dtype=np.int64)
        self.permutation = np.asarray(permutation, dtype=np.int64)


def height_occupation(c: Configuration) -> HeightOccupation:
    """Count, for each level j >= 1, the columns reaching that level."""
    m = c.max_height
    if m == 0:
        return HeightOccupation(np.zeros(0, dtype=np.int64))
    levels = np.arange(1, m + 1, dtype=np.int64)
    counts = (c.heights[None, :] >= levels[:, None]).sum(axis=1)
    return HeightOccupation(counts)


def ordered_view(c: Configuration) -> OrderedView:
    perm = np.argsort(-c.heights, kind="stable")
    return OrderedView(c.heights[perm], perm)


def monopolistic_ge(a: Configuration, b: Configuration) -> bool:
    """True iff every prefix sum of a's sorted heights dominates b's.

    Only defined between configurations of equal mass and equal width.
    """
    if a.n != b.n:
        raise MassMismatchError(f"column counts differ: {a.n} vs {b.n}")
    if a.total != b.total:
        raise MassMismatchError(f"total mass differs: {a.total} vs {b.total}")
    pa = np.cumsum(np.sort(a.heights)[::-1])
    pb = np.cumsum(np.sort(b.heights)[::-1])
    return bool((pa >= pb).all())


def effective_ground(c: Configuration) -> int:
    """Minimal H >= 0 with sum_i (h_i - H)_+^2 <= N.

    The walk rarely descends below this level when the cluster is dense,
    so it acts as a floor for attachment estimates.
    """
    h = c.heights
    n = c.n
    H = 0
    while True:
        excess = np.clip(h - H, 0, None)
        if int((excess * excess).sum()) <= n:
            return H
        H += 1


def in_early_regime(c: Configuration, a: float) -> bool:
    """Membership in the sparse regime: sum h_i^2 <= a*N and |h| < N/2 (strict)."""
    if a <= 0:
        raise ValueError("regime parameter must be positive")
    h = c.heights
    return bool((h * h).sum() <= a * c.n) and (c.total < c.n / 2)
