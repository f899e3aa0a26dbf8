import math

import numpy as np
import pytest

from depolab.engines import GrowthModel, TrajectoryFrame
from depolab.experiments import (
    FRAMES_HEADER,
    census_thresholds,
    fit_logarithmic,
    fit_power_law,
    fmt,
    growth_experiment,
    monopoly_onset,
    points_at,
    read_frames_csv,
    schedule_times,
    summarize,
    tail_bound_check,
    write_frames_csv,
    write_metadata,
    write_summary_csv,
)


def test_schedule_times_expressions():
    assert schedule_times(1000, "lin:1") == [1000]
    assert schedule_times(1000, "crit:1") == [145]
    assert schedule_times(1000, "crit:2") == [290]
    assert schedule_times(100, "crit:1,crit:2,lin:1") == [22, 43, 100]
    assert schedule_times(10, [5, 2, 5]) == [2, 5]
    with pytest.raises(ValueError):
        schedule_times(2, "lin:1")
    with pytest.raises(ValueError):
        schedule_times(100, "lin:0")
    with pytest.raises(ValueError):
        schedule_times(100, [0, 3])


def test_census_thresholds():
    out = census_thresholds(1000, "gamma-log:1,2")
    assert out == [
        ("gamma-log:1", int(math.floor(math.log(1000)))),
        ("gamma-log:2", int(math.floor(2 * math.log(1000)))),
    ]
    assert census_thresholds(50, "abs:5,10") == [("abs:5", 5), ("abs:10", 10)]
    assert census_thresholds(50, "") == []
    with pytest.raises(ValueError):
        census_thresholds(50, "quantile:0.5")


def test_fmt_twelve_significant_digits():
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(2.0) == "2"
    assert fmt(1234.56789012345) == "1234.56789012"


def test_growth_experiment_rows_and_summary():
    rows = growth_experiment(
        GrowthModel("polya"), [10, 20], "lin:1", 5, seed=7,
        census_spec="abs:2",
    )
    # one census label -> one row per (n, realization, recorded time)
    assert len(rows) == 2 * 5
    assert all(r.frame.total == r.frame.t for r in rows)
    summary = summarize(rows)
    assert [(m, n, t, k) for m, n, t, k, _, _ in summary] == [
        ("polya", 10, 10, 5),
        ("polya", 20, 20, 5),
    ]
    for _, _, _, _, mean, se in summary:
        assert mean > 0 and se >= 0


def test_worker_count_does_not_change_output():
    kwargs = dict(
        model=GrowthModel("ballistic"),
        n_values=[8, 12],
        schedule="lin:1",
        realizations=4,
        seed=3,
        census_spec="gamma-log:1",
    )
    serial = growth_experiment(workers=1, **kwargs)
    parallel = growth_experiment(workers=2, **kwargs)
    assert [r.as_csv() for r in serial] == [r.as_csv() for r in parallel]


def test_csv_round_trip(tmp_path):
    rows = growth_experiment(
        GrowthModel("ballistic"), [10], "5,10", 3, seed=11,
        census_spec="abs:1",
    )
    frames_path = tmp_path / "frames.csv"
    write_frames_csv(rows, str(frames_path))
    text = frames_path.read_text().splitlines()
    assert text[0] == FRAMES_HEADER
    back = read_frames_csv(str(frames_path))
    assert len(back) == len(rows)
    assert back[0]["model"] == "ballistic"
    assert int(back[0]["n"]) == 10

    write_summary_csv(rows, str(tmp_path / "summary.csv"))
    header = (tmp_path / "summary.csv").read_text().splitlines()[0]
    assert header.startswith("model,n,t,realizations")

    write_metadata(
        str(tmp_path / "meta.json"), GrowthModel("ballistic"), [10],
        "5,10", 3, 11, "abs:1",
    )
    meta = (tmp_path / "meta.json").read_text()
    assert '"rng_algorithm_id"' in meta and '"master_seed": 11' in meta


def test_read_frames_rejects_wrong_header(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("model,n,t\npolya,3,1\n")
    with pytest.raises(ValueError):
        read_frames_csv(str(bad))


def test_fit_power_law_exact_recovery():
    pts = [(n, 0.5 * n**1.044) for n in (100, 200, 400, 800)]
    fit = fit_power_law(pts)
    assert fit.kind == "power-law"
    assert fit.amplitude == pytest.approx(0.5, rel=1e-12)
    assert fit.exponent_or_slope == pytest.approx(1.044, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)


def test_fit_logarithmic_exact_recovery():
    pts = [(n, 3.0 + 1.957 * math.log(n)) for n in (50, 100, 200, 400)]
    fit = fit_logarithmic(pts)
    assert fit.kind == "logarithmic"
    assert fit.amplitude == pytest.approx(3.0, abs=1e-10)
    assert fit.exponent_or_slope == pytest.approx(1.957, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)


def test_fit_validation():
    with pytest.raises(ValueError):
        fit_power_law([(10, 1.0), (20, 2.0)])
    with pytest.raises(ValueError):
        fit_power_law([(10, 1.0), (20, -2.0), (30, 3.0)])
    with pytest.raises(ValueError):
        fit_logarithmic([(10, 1.0)])


def test_points_at_collapses_census_duplicates():
    rows = growth_experiment(
        GrowthModel("polya"), [10], "lin:1", 4, seed=5,
        census_spec="abs:1,2,3",
    )
    assert len(rows) == 4 * 3  # three census labels per frame
    pts = points_at(rows, "lin:1")
    assert len(pts) == 1
    n, val = pts[0]
    assert n == 10
    direct = np.mean(
        [r.frame.max_height for r in rows if r.census_label == "abs:1"]
    )
    assert val == pytest.approx(direct)


def test_points_at_filters_by_model():
    rows_a = growth_experiment(GrowthModel("polya"), [10], "lin:1", 2, seed=1)
    rows_b = growth_experiment(GrowthModel("ballistic"), [10], "lin:1", 2, seed=1)
    mixed = rows_a + rows_b
    only = points_at(mixed, "lin:1", model="ballistic")
    direct = points_at(rows_b, "lin:1")
    assert only == direct


def test_monopoly_onset_synthetic():
    def frame(t, cap):
        return TrajectoryFrame(t, 0, 0, t, {}, cap)

    frames = [frame(0, 0.0), frame(10, 0.5), frame(20, 0.95), frame(30, 0.99)]
    assert monopoly_onset(frames) == 20
    assert monopoly_onset(frames, threshold=0.99) == 30
    assert monopoly_onset([frame(5, 0.1)]) is None
    assert monopoly_onset([]) is None


def test_tail_bound_check():
    out = tail_bound_check(50, horizon=50, realizations=20, seed=9)
    assert out["n"] == 50 and out["realizations"] == 20
    assert out["mean_max_height"] > 0
    assert set(out["exceedance"]) == {"2", "3", "4", "6"}
    # exceedance fractions are non-increasing in the multiplier
    vals = [out["exceedance"][c] for c in ("2", "3", "4", "6")]
    assert all(a >= b for a, b in zip(vals, vals[1:]))

    empty = tail_bound_check(50, horizon=0, realizations=3, seed=9)
    assert empty["mean_max_height"] == 0.0
