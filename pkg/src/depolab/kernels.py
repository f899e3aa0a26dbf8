"""Exact absorption probabilities, attachment laws and computable bounds.

Everything here is deterministic.  Two independent routes exist for the
ground probability: a backward multiplicative recursion evaluated in log
space, and a tridiagonal solve of the arrival chain.  The stochastic
engines are validated against these kernels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .core import Configuration, HeightOccupation, height_occupation

#: absolute tolerance for kernel identities
KERNEL_TOL = 1e-10


@dataclass
class RecursionTrace:
    """Per-level log factors of the ground-probability recursion.

    ``a_values[k]`` is the log-mass paid at level k (k = 0 .. M-1);
    ``x_values[k]`` is the per-arrival survival fraction 1 - counts[k]/n at
    level k+1.  ``degenerate`` flags a fully occupied level, where the
    ground is unreachable and the recursion short-circuits to 0.
    """

    a_values: np.ndarray
    x_values: np.ndarray
    degenerate: bool = False


@dataclass
class AbsorptionProfile:
    """Distribution of the height at which an explorer first hits the cluster.

    ``masses[h]`` for h = 0 .. M; ``masses[0]`` is the ground probability.
    """

    masses: np.ndarray

    @property
    def ground_probability(self) -> float:
        return float(self.masses[0])


@dataclass
class AttachmentLaw:
    """One-step growth law: per-column probabilities plus per-height slices.

    ``by_height[h]`` (h = 1 .. M) is the probability of attaching at height
    h to one given qualifying column; 0 where no column reaches h.
    """

    model: str
    probabilities: np.ndarray
    by_height: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _counts(z) -> np.ndarray:
    if isinstance(z, HeightOccupation):
        return z.counts
    return np.asarray(z, dtype=np.int64)


def _log_survival_factors(counts: np.ndarray, n: int) -> np.ndarray | None:
    """Backward sweep: per-level log factors a(0) .. a(M-1), or None if a
    level is full."""
    m = counts.size
    x = 1.0 - counts / n
    if (counts >= n).any():
        return None
    a = np.empty(m)
    y = 1.0  # e^{-a(k)} with a(M) = 0
    for k in range(m, 0, -1):
        y = x[k - 1] / (2.0 - x[k - 1] * y)
        a[k - 1] = -math.log(y)
    return a


def ground_probability_recursion(z, n: int) -> tuple[float, RecursionTrace]:
    """Ground probability via the backward recursion, with its trace.

    Accumulates the log factors so astronomically small probabilities do
    not underflow intermediate steps.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    counts = _counts(z)
    x = 1.0 - counts / n
    a = _log_survival_factors(counts, n)
    if a is None:
        return 0.0, RecursionTrace(np.zeros(0), x, degenerate=True)
    return float(math.exp(-a.sum())), RecursionTrace(a, x)


def absorption_profile(z, n: int) -> AbsorptionProfile:
    """First-hit height distribution of the explorer, solved exactly.

    Works on the arrival chain: each arrival at level h is absorbed with
    probability counts[h]/n, otherwise steps down or up with probability
    1/2; arrivals at the ground absorb surely, and excursions above the top
    level collapse back to it (no absorption can happen up there and the
    vertical walk returns with probability 1).  The expected number of
    arrivals per level satisfies one tridiagonal system; absorption masses
    follow by thinning.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    counts = _counts(z)
    m = counts.size
    if m == 0:
        return AbsorptionProfile(np.array([1.0]))
    kappa = counts / n
    surv = 1.0 - kappa
    # unknowns u[0..m-1] = expected arrivals at levels 1..m, entry at m
    diag = np.ones(m)
    diag[m - 1] = 1.0 - 0.5 * surv[m - 1]
    ab = np.zeros((3, m))
    ab[1] = diag
    if m > 1:
        ab[0, 1:] = -0.5 * surv[1:]    # coefficient of u_{h+1} in row h
        ab[2, :-1] = -0.5 * surv[:-1]  # coefficient of u_{h-1} in row h
    rhs = np.zeros(m)
    rhs[m - 1] = 1.0
    u = solve_banded((1, 1), ab, rhs)
    masses = np.empty(m + 1)
    masses[0] = 0.5 * surv[0] * u[0]
    masses[1:] = kappa * u
    # tridiagonal solves are backward-stable here; clamp only boundary noise
    masses[(masses < 0) & (masses > -1e-12)] = 0.0
    masses[(masses > 1) & (masses < 1 + 1e-12)] = 1.0
    return AbsorptionProfile(masses)


def diffusive_attachment_law(c: Configuration) -> AttachmentLaw:
    """Exact per-column one-step law for the symmetric-walk explorer."""
    zeta = height_occupation(c)
    prof = absorption_profile(zeta, c.n)
    m = c.max_height
    by_height = np.zeros(m + 1)
    if m > 0:
        pos = zeta.counts > 0
        by_height[1:][pos] = prof.masses[1:][pos] / zeta.counts[pos]
    # p_i = sum_{h<=sigma_i} masses[h]/zeta_h + ground mass spread uniformly
    cum = np.concatenate(([0.0], np.cumsum(by_height[1:])))
    probs = cum[c.heights] + prof.masses[0] / c.n
    return AttachmentLaw("diffusive", probs, by_height[1:])


def ballistic_attachment_law(c: Configuration) -> AttachmentLaw:
    """Exact per-column one-step law for the straight-down explorer."""
    n = c.n
    zeta = height_occupation(c)
    m = c.max_height
    x = 1.0 - zeta.counts / n
    # s[h] = prob of surviving all levels above h, i.e. prod_{j>h} x_j
    s = np.ones(m + 1)
    if m > 0:
        s[:m] = np.cumprod(x[::-1])[::-1]
    # attach a given qualifying column at height h: arrive there, land on it
    by_height = s[1:] / n if m > 0 else np.zeros(0)
    cum = np.concatenate(([0.0], np.cumsum(by_height)))
    ground = s[0] / n  # survive every level, then land uniformly
    probs = cum[c.heights] + ground
    return AttachmentLaw("ballistic", probs, by_height)


def jensen_lower_bound(z, n: int) -> float:
    """Certified lower bound on the ground probability.

    exp(-(2/n) sum_j j*counts_j - (2/n^2) sum_j j*counts_j^2); vacuous when
    a level is full (exact value 0 < bound).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    counts = _counts(z).astype(np.float64)
    j = np.arange(1, counts.size + 1, dtype=np.float64)
    expo = (2.0 / n) * float((j * counts).sum()) + (2.0 / n**2) * float(
        (j * counts * counts).sum()
    )
    return math.exp(-expo)


def attachment_lower_bound_p12(c: Configuration, i: int) -> float:
    """Lower bound on the diffusive attachment probability of column i.

    Sums, over the levels of column i, the probability gain from deleting
    that level; every term is evaluated through the exact recursion.
    Returns 0 when the ground is unreachable.  Column index is 0-based.
    """
    zeta = height_occupation(c)
    counts = zeta.counts
    pg, trace = ground_probability_recursion(zeta, c.n)
    if pg == 0.0:
        return 0.0
    log_pg = -trace.a_values.sum()
    total = 0.0
    for h in range(1, int(c.heights[i]) + 1):
        punched = counts.copy()
        punched[h - 1] = 0
        a_h = _log_survival_factors(punched, c.n)
        ratio = math.exp(-a_h.sum() - log_pg)
        total += (ratio - 1.0) / counts[h - 1]
    return pg * total


def ballistic_upper_bound(c: Configuration, i: int) -> float:
    """(sigma_i + 1)/N bounds the ballistic attachment probability."""
    return (int(c.heights[i]) + 1) / c.n


def single_column_attachment(height: int, n: int) -> float:
    """Exact attach probability when a lone column of the given height stands.

    Everything that is not a ground landing on one of the other n-1 columns
    feeds the lone column.
    """
    if height < 0 or n < 1:
        raise ValueError("height must be >= 0 and n >= 1")
    counts = np.ones(height, dtype=np.int64)
    pg, _ = ground_probability_recursion(counts, n)
    return 1.0 - pg * (n - 1) / n
