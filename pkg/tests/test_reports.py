"""Convergence report bookkeeping."""

import numpy as np
import pytest

from evtlab.errors import DomainError
from evtlab.reports import CAUCHY_WINDOW, build_report, cauchy_converged


def test_cauchy_converged_uses_only_the_window_tail():
    assert cauchy_converged([100.0, 1.0, 1.0, 1.0], tol=1e-9)
    assert not cauchy_converged([1.0, 1.0, 1.0, 100.0], tol=1e-9)
    # spread exactly at tol counts as converged
    assert cauchy_converged([0.0, 0.5, 1.0], tol=1.0)
    assert not cauchy_converged([0.0, 0.5, 1.0 + 1e-12], tol=1.0)
    assert cauchy_converged([2.0], tol=0.0)
    assert cauchy_converged([5.0, 2.0], tol=3.0, window=5)


def test_cauchy_converged_rejects_nonfinite():
    assert not cauchy_converged([1.0, 1.0, np.nan], tol=1.0)
    assert not cauchy_converged([1.0, np.inf, 1.0], tol=1.0)
    # nonfinite outside the window is ignored
    assert cauchy_converged([np.nan, 1.0, 1.0, 1.0], tol=1e-9)


def test_build_report_per_point_and_overall():
    values = np.array([[1.0, 1.0, 1.0, 1.0], [1.0, 2.0, 3.0, 4.0]])
    rep = build_report("n", (10, 100, 1000, 10_000), "x", (0.5, 2.0), values, tol=1e-6)
    assert rep.converged_per_point == (True, False)
    assert not rep.converged
    assert not rep.verdict
    assert rep.limit_table == ((0.5, 1.0), (2.0, 4.0))
    assert rep.window == CAUCHY_WINDOW


def test_build_report_shape_mismatch():
    with pytest.raises(DomainError):
        build_report("n", (1, 2, 3), "x", (0.5,), np.ones((1, 2)), tol=1.0)


def test_verdict_folds_in_nondegeneracy():
    values = np.ones((1, 4))
    base = dict(
        scale_name="n", scales=(1, 2, 3, 4), point_name="x", points=(1.0,),
        values=values, tol=1e-9,
    )
    assert build_report(**base).verdict  # nondegenerate unknown: converged decides
    assert build_report(**base, nondegenerate=True).verdict
    assert not build_report(**base, nondegenerate=False).verdict


def test_csv_layout_for_uv_and_plain_points():
    values = np.array([[1.0, 2.0], [3.0, 4.0]])
    rep = build_report("eps", (0.1, 0.01), "uv", ((2.0, 4.0), (0.5, 4.0)), values, 1.0)
    header, rows = rep.to_csv_rows()
    assert header == ["eps", "u", "v", "ratio"]
    assert rows[0] == (0.1, 2.0, 4.0, 1.0)
    assert rows[3] == (0.01, 0.5, 4.0, 4.0)

    rep = build_report("n", (10, 100), "x", (1.5,), np.array([[7.0, 8.0]]), 1.0)
    header, rows = rep.to_csv_rows()
    assert header == ["n", "x", "value"]
    assert rows == [(10, 1.5, 7.0), (100, 1.5, 8.0)]


def test_json_round_trip_keys():
    values = np.array([[1.0, 2.0, 3.0]])
    rep = build_report("n", (1, 2, 3), "x", (0.25,), values, tol=0.5)
    d = rep.to_json_dict()
    assert d["scale"] == "n" and d["point"] == "x"
    assert d["grid"] == [1, 2, 3]
    assert d["points"] == [0.25]
    assert d["values"] == [[1.0, 2.0, 3.0]]
    assert d["converged_per_point"] == [False]
    assert d["limit_table"] == [[0.25, 3.0]]
    assert "nondegenerate" not in d
    d2 = build_report("n", (1, 2, 3), "x", (0.25,), values, 0.5,
                      nondegenerate=False).to_json_dict()
    assert d2["nondegenerate"] is False and d2["verdict"] is False
