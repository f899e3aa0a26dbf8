import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from depolab.core import (
    Configuration,
    MassMismatchError,
    effective_ground,
    height_occupation,
    in_early_regime,
    monopolistic_ge,
    ordered_view,
)

from oracles import ordered_partitions


def test_height_occupation_examples():
    assert height_occupation(Configuration([2, 1, 0])).counts.tolist() == [2, 1]
    assert height_occupation(Configuration([0, 0, 0])).counts.tolist() == []
    assert height_occupation(Configuration([3, 3])).counts.tolist() == [2, 2, 2]


def test_height_occupation_mass_identity():
    rng = np.random.default_rng(0)
    for _ in range(10_000):
        c = Configuration(rng.integers(0, 7, size=rng.integers(1, 12)))
        z = height_occupation(c)
        assert int(z.counts.sum()) == c.total
        assert (np.diff(z.counts) <= 0).all()
        assert (z.counts <= c.n).all()


def test_monopolistic_examples():
    assert monopolistic_ge(Configuration([2, 0]), Configuration([1, 1]))
    assert not monopolistic_ge(Configuration([1, 1]), Configuration([2, 0]))
    assert monopolistic_ge(Configuration([3, 1, 0]), Configuration([2, 2, 0]))


def test_monopolistic_mass_mismatch():
    with pytest.raises(MassMismatchError):
        monopolistic_ge(Configuration([2, 0]), Configuration([1, 0]))
    with pytest.raises(MassMismatchError):
        monopolistic_ge(Configuration([2, 0]), Configuration([1, 1, 0]))


def test_monopolistic_order_axioms_exhaustive():
    # reflexive, antisymmetric on sorted multisets, transitive: N=4, mass <= 6
    for mass in range(7):
        configs = [Configuration(p) for p in ordered_partitions(4, mass)]
        for a in configs:
            assert monopolistic_ge(a, a)
        for a, b in itertools.permutations(configs, 2):
            if monopolistic_ge(a, b) and monopolistic_ge(b, a):
                assert a.heights.tolist() == b.heights.tolist()
        for a, b, c in itertools.permutations(configs, 3):
            if monopolistic_ge(a, b) and monopolistic_ge(b, c):
                assert monopolistic_ge(a, c)


@given(
    heights=st.lists(st.integers(0, 8), min_size=2, max_size=8),
    seed=st.integers(0, 2**16),
)
@settings(max_examples=200, deadline=None)
def test_monopolistic_permutation_invariance(heights, seed):
    rng = np.random.default_rng(seed)
    a = Configuration(heights)
    b = Configuration(rng.permutation(np.array(heights)))
    assert monopolistic_ge(a, b) and monopolistic_ge(b, a)


def test_ordered_view_stable_ties():
    c = Configuration([1, 3, 1, 3, 0])
    v = ordered_view(c)
    assert v.sorted_heights.tolist() == [3, 3, 1, 1, 0]
    assert v.permutation.tolist() == [1, 3, 0, 2, 4]
    assert sorted(c.heights[v.permutation].tolist()) == sorted(c.heights.tolist())


def test_effective_ground_examples():
    assert effective_ground(Configuration([0] * 5)) == 0
    assert effective_ground(Configuration([5] + [0] * 8)) == 2
    assert effective_ground(Configuration([1] * 7)) == 0


def test_effective_ground_zero_when_small_energy():
    rng = np.random.default_rng(1)
    for _ in range(300):
        n = int(rng.integers(2, 30))
        h = rng.integers(0, 4, size=n)
        c = Configuration(h)
        if int((h * h).sum()) <= n:
            assert effective_ground(c) == 0


def test_early_regime():
    assert in_early_regime(Configuration([0] * 6), 1.0)
    assert not in_early_regime(Configuration([6] + [0] * 5), 1.0)
    # |heights| = n/2 exactly: the strict inequality excludes it
    assert not in_early_regime(Configuration([1, 1, 0, 0]), 1.0)
    with pytest.raises(ValueError):
        in_early_regime(Configuration([0, 0]), 0.0)


def test_csv_round_trip():
    c = Configuration([2, 1, 0])
    row = c.to_csv_row()
    assert row == "3,2,1,0"
    assert Configuration.from_csv_row(row) == c
    with pytest.raises(ValueError):
        Configuration.from_csv_row("2,1")
    with pytest.raises(ValueError):
        Configuration.from_csv_row("a,b,c")
