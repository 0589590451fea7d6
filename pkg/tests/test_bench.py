import csv
import json
import time

import numpy as np
import pytest

from eigmax.data.constants import PURE
from eigmax.data.errorhandler import InvalidInputError
from eigmax.pmath.linalg import TriQ
from eigmax.cli.bench import bench_sweep


def test_default_mixed():
    report = bench_sweep("quadratic_bd", [8, 1000])
    small, large = report.rows
    np.testing.assert_allclose([small.z0, small.z1, small.z2], [0.523309, 0.525268, 0.525268], atol=1e-6)
    np.testing.assert_allclose([large.z0, large.z1, large.z2], [0.338027, 0.327254, 0.32724], rtol=1e-5)
    assert small.ratio - 1 < 1e-10
    assert large.ratio - 1 < 1e-6
    assert report.xi == 7 / 8


def test_pure():
    row, = bench_sweep("quadratic_bd", [100], xi=PURE).rows
    np.testing.assert_allclose([row.z0, row.z1, row.z2], [0.348549, 0.376437, 0.376383], atol=1e-6)
    assert row.lower <= row.z2 * (1 + 1e-12)
    assert row.ratio - 1 < 1e-6


SIZES = [8, 100, 500, 1000, 5000, 7500, 10_000]

PURE_ROWS = [
    (0.4859846, 0.5253127, 0.5252680),
    (0.348549, 0.376437, 0.376383),
    (0.310195, 0.338402, 0.338329),
    (0.299089, 0.32732, 0.32724),
    (0.281156, 0.308623, 0.308529),
    (0.277865, 0.305016, 0.304918),
    (0.275762, 0.30266, 0.302561),
]

MIXED_ROWS = [
    (0.523309, 0.5252681, 0.525268),
    (0.387333, 0.376393, 0.376383),
    (0.349147, 0.338342, 0.338329),
    (0.338027, 0.327254, 0.32724),
    (0.319895, 0.30855, 0.308529),
    (0.316529, 0.304942, 0.304918),
    (0.31437, 0.302586, 0.302561),
]


@pytest.mark.parametrize("xi, expected", [(PURE, PURE_ROWS), (None, MIXED_ROWS)])
def test_quadratic_sweep(xi, expected):
    start = time.perf_counter()
    report = bench_sweep("quadratic_bd", SIZES, xi=xi)
    assert time.perf_counter() - start < 30.
    assert [r.size for r in report.rows] == SIZES
    got = [(r.z0, r.z1, r.z2) for r in report.rows]
    np.testing.assert_allclose(got, expected, rtol=2e-5)
    for r in report.rows:
        assert r.ratio - 1 < 1e-5


def test_general_strategy():
    row, = bench_sweep("quadratic_bd", [8], strategy="general").rows
    np.testing.assert_allclose([row.z0, row.z1, row.z2], [0.784580, 0.528215, 0.525268], atol=1e-6)


def test_rows_sorted_with_jobs():
    report = bench_sweep("quadratic_bd", [64, 8, 32, 8], jobs=3)
    assert [r.size for r in report.rows] == [8, 32, 64]
    z = [r.z2 for r in report.rows]
    assert z[0] > z[1] > z[2]


def test_outputs(tmp_path):
    report = bench_sweep("quadratic_bd", [8, 16])
    data = json.loads(report.to_json())
    assert data["family"] == "quadratic_bd"
    assert [r["size"] for r in data["rows"]] == [8, 16]
    path = tmp_path / "bench.csv"
    report.to_csv(path)
    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    assert [int(r["size"]) for r in rows] == [8, 16]
    assert float(rows[0]["z2"]) == pytest.approx(0.525268, abs=1e-6)
    assert report.to_table().splitlines()[0].split()[0] == "N+1"


@pytest.mark.parametrize("kwargs", [
    {"sizes": [1]},
    {"sizes": []},
    {"sizes": [8], "strategy": "lanczos"},
    {"sizes": [8], "jobs": 0},
    {"sizes": [3000], "strategy": "general"},
])
def test_rejects(kwargs):
    with pytest.raises(InvalidInputError):
        bench_sweep("quadratic_bd", **kwargs)


def test_custom_rates():
    row, = bench_sweep("custom_bd", [6], rates=(1., 2., 3.)).rows
    T = TriQ(np.ones(5), np.full(5, 2.), np.r_[np.zeros(5), 3.])
    lam = np.linalg.eigvals(T.to_qmat().negated()).real.min()
    assert row.z2 == pytest.approx(lam, rel=1e-6)


@pytest.mark.parametrize("family, rates", [("custom_bd", None), ("custom_bd", (1., 0., 3.)), ("cubic_bd", None)])
def test_rejects_family(family, rates):
    with pytest.raises(InvalidInputError):
        bench_sweep(family, [8], rates=rates)
