import itertools

import numpy as np
import pytest

from depolab.core import Configuration, monopolistic_ge
from depolab.coupling import (
    CoupledRun,
    DominanceViolation,
    OrderedConfig,
    add_and_reorder,
    drop_position,
    increase_positions,
    polya_law,
    prefix_dominance,
    ratio_condition,
    select_index,
    uniform_law,
)
from depolab.kernels import ballistic_attachment_law, diffusive_attachment_law

from oracles import ordered_partitions, prefix_ge


def _diffusive(o: OrderedConfig) -> np.ndarray:
    return diffusive_attachment_law(o.to_configuration()).probabilities


def _ballistic(o: OrderedConfig) -> np.ndarray:
    return ballistic_attachment_law(o.to_configuration()).probabilities


def test_ordered_config_validation():
    OrderedConfig([3, 3, 1, 0])
    with pytest.raises(ValueError):
        OrderedConfig([1, 2])
    assert OrderedConfig.zero(4).total == 0


def test_increase_positions():
    assert increase_positions(OrderedConfig([2, 2, 1, 0, 0])) == {1, 3, 4}
    assert increase_positions(OrderedConfig([0, 0, 0])) == {1}
    assert increase_positions(OrderedConfig([3, 2, 1])) == {1, 2, 3}


def test_drop_position():
    o = OrderedConfig([2, 2, 1, 0, 0])
    assert drop_position(o, 1) == 1
    assert drop_position(o, 2) == 1
    assert drop_position(o, 3) == 3
    assert drop_position(o, 5) == 4
    with pytest.raises(ValueError):
        drop_position(o, 6)
    with pytest.raises(ValueError):
        drop_position(o, 0)


def test_add_and_reorder():
    o = OrderedConfig([2, 2, 1, 0, 0])
    assert add_and_reorder(o, 2).heights.tolist() == [3, 2, 1, 0, 0]
    assert add_and_reorder(o, 5).heights.tolist() == [2, 2, 1, 1, 0]
    # result always stays ordered and total grows by one
    rng = np.random.default_rng(0)
    for _ in range(500):
        h = np.sort(rng.integers(0, 6, size=6))[::-1]
        o = OrderedConfig(h)
        j = int(rng.integers(1, 7))
        new = add_and_reorder(o, j)
        assert new.total == o.total + 1
        assert (np.diff(new.heights) <= 0).all()
        assert sorted(new.heights.tolist()) != sorted(h.tolist())


def test_polya_and_uniform_laws():
    o = OrderedConfig([2, 1, 0])
    assert polya_law(o) == pytest.approx([1 / 2, 1 / 3, 1 / 6])
    assert uniform_law(o) == pytest.approx([1 / 3] * 3)
    assert polya_law(OrderedConfig.zero(4)) == pytest.approx([0.25] * 4)


def test_prefix_dominance_examples():
    assert prefix_dominance([0.25, 0.75], [0.5, 0.5])
    assert not prefix_dominance([0.5, 0.5], [0.25, 0.75])
    assert prefix_dominance([0.5, 0.5], [0.5, 0.5])
    with pytest.raises(ValueError):
        prefix_dominance([1.0], [0.5, 0.5])


def test_ratio_condition_examples_and_validation():
    assert ratio_condition([0.5, 0.5], [0.7, 0.3])
    assert not ratio_condition([0.7, 0.3], [0.5, 0.5])
    with pytest.raises(ValueError):
        ratio_condition([0.0, 1.0], [0.5, 0.5])
    with pytest.raises(ValueError):
        ratio_condition([0.6, 0.6], [0.5, 0.5])


def test_ratio_condition_implies_prefix_dominance():
    rng = np.random.default_rng(1)
    checked = 0
    for _ in range(10_000):
        k = int(rng.integers(2, 8))
        p = rng.random(k) + 0.01
        q = rng.random(k) + 0.01
        p /= p.sum()
        q /= q.sum()
        if ratio_condition(p, q):
            checked += 1
            assert prefix_dominance(p, q)
    assert checked > 100  # the property test actually exercised the branch


def test_select_index_examples():
    assert select_index(np.full(4, 0.25), 0.6) == 3
    assert select_index(polya_law(OrderedConfig([1, 0])), 0.5) == 1
    assert select_index(polya_law(OrderedConfig([2, 1, 0])), 0.5) == 2
    assert select_index(np.array([0.5, 0.5]), 0.0) == 1
    assert select_index(np.array([0.5, 0.5]), 0.5) == 2
    with pytest.raises(ValueError):
        select_index(np.array([0.5, 0.4]), 0.5)


def test_monopolistic_matches_prefix_oracle_exhaustive():
    # the order on sorted representatives is exactly prefix-sum dominance
    for mass in range(7):
        parts = ordered_partitions(4, mass)
        for a, b in itertools.product(parts, repeat=2):
            assert monopolistic_ge(
                Configuration(a), Configuration(b)
            ) == prefix_ge(a, b)


def test_polya_monotone_in_order_exhaustive():
    """More monopolistic states have prefix-dominating reinforcement laws.
    Exhaustive over width 4, mass up to 8."""
    for mass in range(9):
        parts = [OrderedConfig(p) for p in ordered_partitions(4, mass)]
        for a, b in itertools.product(parts, repeat=2):
            if prefix_ge(a.heights, b.heights):
                assert prefix_dominance(polya_law(b), polya_law(a))


def test_coupled_run_uniform_polya():
    run = CoupledRun.from_laws(
        [("uniform", uniform_law), ("polya", polya_law)], 6
    )
    run.run(300, np.random.default_rng(2))
    assert run.t == 300
    rec = run.history[-1]
    assert rec.hypothesis_ok == [True]
    assert rec.dominates == [True]
    assert run.processes[0].state.total == 300


def test_coupled_run_four_chain():
    run = CoupledRun.from_laws(
        [
            ("uniform", uniform_law),
            ("polya", polya_law),
            ("ballistic", _ballistic),
            ("diffusive", _diffusive),
        ],
        8,
    )
    run.run(120, np.random.default_rng(3))
    for rec in run.history:
        assert all(rec.dominates)
        # uniform vs polya always satisfies the prefix hypothesis
        assert rec.hypothesis_ok[0]


def test_step_input_validation():
    run = CoupledRun.from_laws([("uniform", uniform_law)], 3)
    with pytest.raises(ValueError):
        run.step(1.0)
    with pytest.raises(ValueError):
        run.step(-0.1)


def test_violation_has_diagnostic():
    # a deliberately reversed chain breaks dominance quickly
    run = CoupledRun.from_laws(
        [("polya", polya_law), ("uniform", uniform_law)], 4
    )
    with pytest.raises(DominanceViolation) as err:
        run.run(200, np.random.default_rng(4))
    assert "t=" in str(err.value)
