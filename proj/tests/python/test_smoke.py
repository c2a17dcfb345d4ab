"""Smoke tests for the python bindings."""

import json

import pytest

import qslab


def test_angles_round_trip():
    a = qslab.Angle.from_text("cf:[0;1,...]")
    assert a.to_text() == "cf:[0;1,...]"
    lo, hi = a.eval(40)
    assert lo <= 0.618033988749894 <= hi
    assert hi - lo <= 2**-40


def test_compare_and_eval_point():
    a = qslab.Angle.from_text("quad:(0,1,2,4)")
    one = qslab.TorusPoint(z=1)
    two = qslab.TorusPoint(z=2)
    assert qslab.compare(one, two, a) == qslab.Ordering.Less
    lo, hi = qslab.eval_point(two, a, 30)
    assert abs((lo + hi) / 2 - 0.7071067811) < 1e-6


def test_induced_map_boundary():
    a = qslab.golden_conjugate()
    p = qslab.IntervalPartition.sturmian(a)
    q = qslab.induced_map("lin:p=2:1+x^1", p)
    texts = sorted(b.to_text() for b in q.boundary())
    assert texts == ["0*al+0/1", "2*al+0/1"]


def test_chopping_counts_follow_nu():
    a = qslab.golden_conjugate()
    p = qslab.IntervalPartition.sturmian(a)
    counts = qslab.chopping_counts("lin:p=2:1+x^1", p, 32)
    assert counts == [2 ** qslab.nu(n + 1) for n in range(33)]


def test_conjugacy_check():
    a = qslab.golden_conjugate()
    p = qslab.IntervalPartition.sturmian(a)
    t = qslab.TorusPoint(num=1, den=5)
    assert qslab.conjugacy_check("lin:p=2:1+x^1", p, t, 4, 0, 512)


def test_trajectory_and_besicovitch():
    a = qslab.golden_conjugate()
    p = qslab.IntervalPartition.sturmian(a)
    t = qslab.TorusPoint(num=1, den=5)
    w = qslab.trajectory(p, t, 0, 1000)
    assert len(w) == 1000
    zero = qslab.IntervalPartition.trivial(a, 2, 0)
    wz = qslab.trajectory(zero, t, 0, 1000)
    db = qslab.besicovitch_estimate(w, wz)
    assert abs(2 * db - 2 * 0.618) < 0.05


def test_run_experiment_report():
    cfg = {
        "experiment": "suites",
        "grid_cases": 4,
        "metric_cases": 1,
        "window": 20000,
        "seed": 5,
    }
    report = json.loads(qslab.run_experiment(json.dumps(cfg)))
    assert report["pass"] is True
    assert report["body"]["conjugacy_pass"] == 4


def test_precision_exhausted_maps_to_python():
    a = qslab.dyadic_recurrent_angle()
    p = qslab.TorusPoint(z=2**31)
    q = qslab.TorusPoint(num=1, den=2**32)
    with pytest.raises(qslab.PrecisionExhausted):
        qslab.compare(p, q, a, 64)
