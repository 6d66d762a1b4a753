import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import metric_spaces
from pgh import spaces
from pgh._config import BudgetExceeded, StructureError
from pgh.parith import INF
from pgh.projections import snowflake
from pgh.spaces import FiniteMetricSpace, equilateral, line_space, point_space, validate


def test_structural_errors_are_distinct_from_triangle_violations():
    cases = [
        [[0, 1], [2, 0]],  # asymmetric
        [[0, -1], [-1, 0]],  # negative
        [[1, 1], [1, 0]],  # nonzero diagonal
        [[0, 0], [0, 0]],  # zero off-diagonal
        [[0, float("nan")], [float("nan"), 0]],
    ]
    for m in cases:
        with pytest.raises(StructureError):
            FiniteMetricSpace(["a", "b"], m)
    with pytest.raises(StructureError):
        FiniteMetricSpace(["a", "a"], [[0, 1], [1, 0]])
    with pytest.raises(StructureError):
        FiniteMetricSpace(["a"], [[0, 1], [1, 0]])


def test_symmetrize_tolerates_rounding_only():
    X = FiniteMetricSpace(["a", "b"], [[0, 1], [1 + 1e-12, 0]], symmetrize=True)
    assert X.dist[0, 1] == X.dist[1, 0]
    with pytest.raises(StructureError):
        FiniteMetricSpace(["a", "b"], [[0, 1], [1.1, 0]], symmetrize=True)


def test_matrix_is_read_only_copy():
    m = np.array([[0.0, 1.0], [1.0, 0.0]])
    X = FiniteMetricSpace(["a", "b"], m)
    m[0, 1] = 5
    assert X.d("a", "b") == 1
    with pytest.raises(ValueError):
        X.dist[0, 1] = 3


def test_validate_examples():
    assert validate(equilateral(2, 1), INF).ok
    res = validate(line_space([0, 1, 2]), 2)
    assert not res.ok
    assert res.triple == ("0", "1", "2")
    assert res.slack == pytest.approx(2 - np.sqrt(2))
    assert validate(line_space([0, 1, 2]), 1).ok
    bad = FiniteMetricSpace(list("abc"), [[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    assert not validate(bad, 1).ok


def test_classify_reports_largest_verified_exponent():
    assert spaces.classify(equilateral(3, 1.0)).verified_p == INF
    assert spaces.classify(line_space([0, 1, 2])).verified_p == 1.0
    assert spaces.classify(point_space()).verified_p == INF


def test_invariants_examples():
    D = equilateral(2, 2.0)
    assert spaces.diameter(D) == 2 and spaces.separation(D) == 2
    assert spaces.spectrum(D) == [0.0, 2.0]
    assert spaces.diameter(point_space()) == 0
    with pytest.raises(ValueError):
        spaces.separation(point_space())
    assert spaces.spectrum(equilateral(3, 1.0)) == [0.0, 1.0]
    assert spaces.spectrum_eps(D, 1) == [2.0]
    assert spaces.spectrum_eps(D, 3) == []
    assert spaces.spectrum_eps(D, 0) == [0.0, 2.0]


def test_curvature_examples():
    K = spaces.curvature_set(equilateral(2, 1.0), 2)
    assert K == {((0.0, 0.0), (0.0, 0.0)), ((0.0, 1.0), (1.0, 0.0))}
    assert spaces.curvature_set(line_space([0, 3, 7]), 1) == {((0.0,),)}
    assert spaces.curvature_set(equilateral(2, 1.0), 2) == spaces.curvature_set(equilateral(3, 1.0), 2)
    assert spaces.curvature_set(equilateral(2, 1.0), 3) != spaces.curvature_set(equilateral(3, 1.0), 3)
    with pytest.raises(BudgetExceeded, match="budget"):
        spaces.curvature_set(equilateral(10, 1.0), 8, limit=1000)


@pytest.mark.parametrize("X", metric_spaces(30, seed=11, n_lo=1, n_hi=5))
def test_curvature_relabel_invariance(X):
    order = list(reversed(range(len(X))))
    assert spaces.curvature_set(X, 3) == spaces.curvature_set(X.permuted(order).relabeled(
        [f"z{i}" for i in range(len(X))]), 3)


@pytest.mark.parametrize("X", metric_spaces(40, seed=12, n_lo=2, n_hi=8))
@pytest.mark.parametrize("p", [2.0, 4.0, 64.0])
def test_snowflake_closure(X, p):
    assert validate(X, 1).ok
    assert validate(snowflake(X, 1.0 / p), p).ok


@pytest.mark.parametrize("X", metric_spaces(40, seed=13, n_lo=2, n_hi=8, kind="p_metric", p=4.0))
def test_inclusion_chain(X):
    assert validate(X, 4.0).ok
    for q in (1.0, 1.5, 2.0, 3.0):
        assert validate(X, q).ok


@settings(max_examples=60, deadline=None)
@given(pts=st.lists(st.integers(-50, 50), min_size=2, max_size=7, unique=True))
def test_line_spaces_are_metric_and_not_ultrametric_beyond_two(pts):
    X = line_space(pts)
    assert validate(X, 1).ok
    if len(pts) >= 3:
        assert not validate(X, INF).ok


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7), st.floats(0.1, 100))
def test_spectrum_size_for_equilateral(n, a):
    assert len(spaces.spectrum(equilateral(n, a))) == (1 if n == 1 else 2)


def test_json_and_csv_io(tmp_path):
    X = line_space([0, 1, 3], labels=["a", "b", "c"])
    jpath = tmp_path / "x.json"
    jpath.write_text(spaces.dumps(X))
    assert spaces.load(jpath).allclose(X)
    cpath = tmp_path / "x.csv"
    cpath.write_text(spaces.to_csv(X))
    assert spaces.load(cpath).allclose(X)
    data = json.loads(spaces.dumps(X))
    assert data["labels"] == ["a", "b", "c"]
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(StructureError):
        spaces.load(bad)
    bad.write_text('{"labels": ["a"]}')
    with pytest.raises(StructureError):
        spaces.load(bad)


def test_dumps_uses_twelve_significant_digits():
    X = FiniteMetricSpace(["a", "b"], [[0, 1 / 3], [1 / 3, 0]])
    assert json.loads(spaces.dumps(X))["matrix"][0][1] == 0.333333333333


def test_index_errors_name_the_label():
    with pytest.raises(KeyError, match="nope"):
        equilateral(2, 1).index("nope")
