"""Self-contained invariant suite behind the `validate` CLI command.

Each check returns (name, ok, detail).  Sizes shrink under quick mode so
the command stays interactive; the full suite is the pre-flight check for
long experiment campaigns.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.stats import chisquare

from .core import Configuration, height_occupation
from .coupling import CoupledRun, DominanceViolation, polya_law, uniform_law
from .engines import (
    BallisticEngine,
    DiffusiveDirectEngine,
    DiffusiveWalkEngine,
    GrowthModel,
    LevelSampler,
    RngStream,
)
from .kernels import (
    absorption_profile,
    attachment_lower_bound_p12,
    ballistic_attachment_law,
    ballistic_upper_bound,
    diffusive_attachment_law,
    ground_probability_recursion,
    jensen_lower_bound,
)


def random_configuration(rng, n_max=60, h_max=12, sparse=False) -> Configuration:
    """Random configuration; sparse keeps |heights| < n/2 with no full level."""
    n = int(rng.integers(4, n_max + 1))
    if sparse:
        budget = int(rng.integers(0, n // 2))
        heights = np.zeros(n, dtype=np.int64)
        for _ in range(budget):
            heights[rng.integers(n)] += 1
    else:
        heights = rng.integers(0, h_max + 1, size=n).astype(np.int64)
    return Configuration(heights)


def check_recursion_vs_solver(rng, samples) -> tuple[bool, str]:
    worst = 0.0
    for _ in range(samples):
        c = random_configuration(rng, n_max=100, h_max=50)
        z = height_occupation(c)
        pg, _ = ground_probability_recursion(z, c.n)
        prof = absorption_profile(z, c.n)
        worst = max(worst, abs(pg - prof.ground_probability))
    return worst <= 1e-10, f"max |recursion - solver| = {worst:.3e}"


def check_law_normalization(rng, samples) -> tuple[bool, str]:
    worst = 0.0
    for _ in range(samples):
        c = random_configuration(rng)
        for law in (diffusive_attachment_law(c), ballistic_attachment_law(c)):
            worst = max(worst, abs(law.probabilities.sum() - 1.0))
    return worst <= 1e-12, f"max |sum - 1| = {worst:.3e}"


def check_bounds(rng, samples) -> tuple[bool, str]:
    violations = 0
    for _ in range(samples):
        c = random_configuration(rng, sparse=True)
        z = height_occupation(c)
        pg, _ = ground_probability_recursion(z, c.n)
        if jensen_lower_bound(z, c.n) > pg + 1e-12:
            violations += 1
        dlaw = diffusive_attachment_law(c)
        blaw = ballistic_attachment_law(c)
        for i in range(c.n):
            if attachment_lower_bound_p12(c, i) > dlaw.probabilities[i] + 1e-12:
                violations += 1
            if blaw.probabilities[i] > ballistic_upper_bound(c, i) + 1e-12:
                violations += 1
    return violations == 0, f"{violations} bound violations"


def check_prefix_dominance_over_polya(rng, samples) -> tuple[bool, str]:
    violations = 0
    for _ in range(samples):
        c = random_configuration(rng)
        ordered = Configuration(np.sort(c.heights)[::-1])
        from .coupling import OrderedConfig, prefix_dominance

        o = OrderedConfig(ordered.heights)
        q = polya_law(o)
        for law in (
            diffusive_attachment_law(ordered),
            ballistic_attachment_law(ordered),
        ):
            if not prefix_dominance(q, law.probabilities):
                violations += 1
    return violations == 0, f"{violations} prefix-dominance violations"


def check_coupling_dominance(rng, runs, n=20, horizon=60) -> tuple[bool, str]:
    def diffusive(o):
        return diffusive_attachment_law(o.to_configuration()).probabilities

    def ballistic(o):
        return ballistic_attachment_law(o.to_configuration()).probabilities

    chains = [
        [("uniform", uniform_law), ("polya", polya_law), ("ballistic", ballistic)],
        [("uniform", uniform_law), ("polya", polya_law), ("diffusive", diffusive)],
    ]
    try:
        for chain in chains:
            for _ in range(runs):
                run = CoupledRun.from_laws(chain, n)
                run.run(horizon, rng)
    except DominanceViolation as exc:
        return False, str(exc)
    return True, f"{2 * runs} runs x {horizon} steps, no violation"


def check_engine_equivalence(rng, samples, fault=False) -> tuple[bool, str]:
    heights = (np.arange(30)[::-1] // 6).astype(np.int64)
    c = Configuration(heights)
    exact = diffusive_attachment_law(c).probabilities.copy()
    if fault:
        exact = np.roll(exact, 1)  # deliberate corruption for the self-test
    walk = DiffusiveWalkEngine(c.n, rng, heights)
    direct = DiffusiveDirectEngine(c.n, rng, heights)
    pvals = []
    for engine in (walk, direct):
        cols = engine.draw_columns(samples)
        obs = np.bincount(cols, minlength=c.n)
        stat = chisquare(obs, exact * samples)
        pvals.append(float(stat.pvalue))
    ok = all(p > 0.001 for p in pvals)
    return ok, f"chi-square p-values walk={pvals[0]:.4f} direct={pvals[1]:.4f}"


def check_level_sampler(rng, increments) -> tuple[bool, str]:
    n = 25
    sampler = LevelSampler(np.zeros(n, dtype=np.int64))
    for _ in range(increments):
        sampler.increment(int(rng.integers(n)))
        # spot-check one level against a recount
        j = int(rng.integers(1, sampler.max_height + 1))
        if sampler.count_at(j) != int((sampler.heights >= j).sum()):
            return False, f"boundary mismatch at level {j}"
    z = height_occupation(Configuration(sampler.heights))
    ok = bool(np.array_equal(sampler.counts(), z.counts))
    return ok, f"{increments} increments, counts consistent: {ok}"


def run_suite(quick=False, seed=20260825, inject_fault=False):
    """Execute the suite; returns a list of (name, ok, detail)."""
    rng = np.random.default_rng(seed)
    samples = 100 if quick else 400
    results = [
        ("recursion-vs-solver", *check_recursion_vs_solver(rng, samples)),
        ("law-normalization", *check_law_normalization(rng, samples)),
        ("bound-suite", *check_bounds(rng, 40 if quick else 150)),
        (
            "prefix-dominance-polya",
            *check_prefix_dominance_over_polya(rng, samples),
        ),
        (
            "coupling-dominance",
            *check_coupling_dominance(rng, 5 if quick else 25),
        ),
        (
            "engine-equivalence",
            *check_engine_equivalence(
                rng, 20000 if quick else 100000, fault=inject_fault
            ),
        ),
        ("level-sampler", *check_level_sampler(rng, 2000 if quick else 10000)),
    ]
    return results
