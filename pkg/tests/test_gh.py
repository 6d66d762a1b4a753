import math

import numpy as np
import pytest

from corpus import metric_spaces, ultrametric_pairs
from pgh import gh
from pgh._config import BudgetExceeded, InvalidCorrespondence, TriangleViolation
from pgh.generators import SplitMix64, sample
from pgh.parith import INF, coefficient, inv, p_sum
from pgh.projections import project
from pgh.spaces import diameter, equilateral, line_space, point_space

TOL = 1e-9
D1, D15 = equilateral(2, 1.0), equilateral(2, 1.5)


def small_pairs(count, seed, n_hi=4, kind="metric", **kw):
    xs = metric_spaces(2 * count, seed=seed, n_lo=1, n_hi=n_hi, kind=kind, **kw)
    return list(zip(xs[::2], xs[1::2]))


# distortions

def test_dis_p_examples():
    X = sample(7, "metric", 4)
    star = point_space()
    product = {(i, 0) for i in range(len(X))}
    assert gh.dis_p(product, X, star, 1) == pytest.approx(diameter(X))
    ident = {(i, i) for i in range(len(X))}
    assert gh.dis_p(ident, X, X, 2) == 0
    L = line_space([0, 1, 2])
    A, B = project(L, 2).space, L.scaled(2 ** -0.5)
    diag = {(i, i) for i in range(3)}
    assert gh.dis_p(diag, A, B, 1) == pytest.approx(float(np.abs(A.dist - B.dist).max()))
    assert gh.dis_p(diag, A, B, 1) == pytest.approx(1 - 2 ** -0.5)


def test_invalid_correspondence_names_point():
    with pytest.raises(InvalidCorrespondence, match="point 1 of X"):
        gh.dis_p({(0, 0)}, D1, D1, 1)
    with pytest.raises(InvalidCorrespondence, match="point 1 of Y"):
        gh.dis_p({(0, 0), (1, 0)}, D1, D1, 1)
    with pytest.raises(InvalidCorrespondence):
        gh.dis_p({(0, 5), (1, 1), (0, 0)}, D1, D1, 1)


def test_map_formulas_against_correspondence():
    X, Y = sample(1, "metric", 3), sample(2, "metric", 3)
    phi, psi = [0, 2, 1], [1, 1, 0]
    corr = gh.Correspondence.from_maps(phi, psi)
    assert gh.dis_p(corr, X, Y, 2) == pytest.approx(
        max(gh.dis_p_map(phi, X, Y, 2), gh.dis_p_map(psi, Y, X, 2), gh.codis_p(phi, psi, X, Y, 2))
    )


# exact values

def test_two_point_examples():
    assert gh.dghp_exact(D1, D15, 1).value == pytest.approx(0.25, abs=TOL)
    assert gh.dghp_exact(D1, D15, INF).value == pytest.approx(1.5, abs=TOL)
    assert gh.dghp_via_maps(D1, D15, 1) == pytest.approx(0.25, abs=TOL)
    assert gh.ugh_structural(D1, D15).value == pytest.approx(1.5, abs=TOL)
    assert gh.ugh_hat(D1, D15) == pytest.approx(1.5, abs=TOL)


@pytest.mark.parametrize("p", [1.0, 2.0, INF])
def test_self_distance_is_zero(p):
    X = sample(3, "metric", 4)
    rep = gh.dghp_exact(X, X, p)
    assert rep.value == 0 and rep.exact and rep.method == "exact_enumeration"
    assert gh.dis_p(rep.witness["correspondence"], X, X, p) == 0
    assert gh.dghp_via_maps(X, X, p) == 0


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, INF])
@pytest.mark.parametrize("X, Y", small_pairs(12, seed=41, n_hi=4))
def test_exact_matches_raw_subsets(X, Y, p):
    if len(X) * len(Y) > 16:
        pytest.skip("raw subset scan too slow")
    rep = gh.dghp_exact(X, Y, p)
    assert rep.value == pytest.approx(gh.dghp_bruteforce(X, Y, p), abs=TOL)
    corr = rep.witness["correspondence"]
    assert coefficient(p) * gh.dis_p(corr, X, Y, p) == pytest.approx(rep.value, abs=TOL)


@pytest.mark.parametrize("p", [1.0, 2.0, INF])
@pytest.mark.parametrize("X, Y", small_pairs(50, seed=42, n_hi=4))
def test_maps_agree_with_exact(X, Y, p):
    value, (phi, psi) = gh.dghp_via_maps(X, Y, p, return_maps=True)
    assert value == pytest.approx(gh.dghp_exact(X, Y, p).value, abs=TOL)
    recomputed = max(gh.dis_p_map(phi, X, Y, p), gh.dis_p_map(psi, Y, X, p), gh.codis_p(phi, psi, X, Y, p))
    assert coefficient(p) * recomputed == pytest.approx(value, abs=TOL)


def test_budget_guard():
    big = equilateral(9, 1.0)
    with pytest.raises(BudgetExceeded, match="bounds or the structural method"):
        gh.dghp_exact(big, big, 1)
    with pytest.raises(BudgetExceeded):
        gh.dghp_via_maps(D1, D15, 1, limit=10)
    with pytest.raises(BudgetExceeded):
        gh.dghp_bruteforce(equilateral(5, 1.0), equilateral(5, 1.0), 1)


def test_budget_env(monkeypatch):
    monkeypatch.setenv("PGH_BUDGET", "5")
    with pytest.raises(BudgetExceeded):
        gh.dghp_exact(equilateral(3, 1.0), equilateral(3, 2.0), 1)


@pytest.mark.parametrize("X, Y", small_pairs(40, seed=43, n_hi=4))
def test_monotone_in_p(X, Y):
    vals = [gh.dghp_exact(X, Y, p).value for p in (1.0, 2.0, 4.0, INF)]
    assert all(a <= b + TOL for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("k", range(40))
def test_p_triangle(k):
    rng = SplitMix64(4400 + k)
    p = (1.0, 1.5, 2.0, 4.0, INF)[rng.below(5)]
    X, Y, Z = (sample(rng.next(), "metric", 1 + rng.below(4)) for _ in range(3))
    d = lambda A, B: gh.dghp_exact(A, B, p).value  # noqa: E731
    assert d(X, Y) <= p_sum(d(X, Z), d(Z, Y), p) + TOL


# ultrametric case

@pytest.mark.parametrize("X, Y", ultrametric_pairs(80, seed=45))
def test_structural_witness(X, Y):
    rep = gh.ugh_structural(X, Y)
    t = rep.value
    levels = gh.merged_spectrum(X, Y)
    assert t in levels
    assert rep.witness["level"] == t
    from pgh.dendrograms import ClusterTree
    tx, ty = ClusterTree.of(X), ClusterTree.of(Y)
    assert all(tx.signature(s) != ty.signature(s) for s in levels if s < t)
    corr = rep.witness["correspondence"].check(len(X), len(Y))
    assert gh.dis_p(corr, X, Y, INF) <= t + TOL
    assert gh.ugh_structural(X, Y, linear=True).value == t
    assert gh.dghp_exact(X, Y, INF).value == pytest.approx(t, abs=TOL)


def test_structural_examples():
    X = sample(8, "ultrametric", 5)
    assert gh.ugh_structural(X, X).value == 0
    Y = sample(9, "ultrametric", 3, lo=20, hi=30)
    assert gh.ugh_structural(X, Y).value == max(diameter(X), diameter(Y))
    with pytest.raises(TriangleViolation):
        gh.ugh_structural(line_space([0, 1, 2]), D1)


@pytest.mark.parametrize("X, Y", ultrametric_pairs(60, seed=46))
def test_hat_equals_ugh(X, Y):
    assert gh.ugh_hat(X, Y) == pytest.approx(gh.ugh_structural(X, Y).value, abs=TOL)


def test_hausdorff_examples():
    X = sample(10, "ultrametric", 6)
    assert gh.hausdorff_ultra(X, [0, 2], [2, 0]) == 0
    D2 = equilateral(2, 2.0, prefix="p")
    assert gh.hausdorff_ultra(D2, ["p0"], ["p1"]) == 2
    with pytest.raises(ValueError):
        gh.hausdorff_ultra(X, [], [1])


@pytest.mark.parametrize("k", range(100))
def test_hausdorff_structural_vs_direct(k):
    rng = SplitMix64(4700 + k)
    n = 1 + rng.below(8)
    X = sample(rng.next(), "ultrametric", n, levels=3 if k % 2 else None)
    A = [i for i in range(n) if rng.below(2)] or [0]
    B = [i for i in range(n) if rng.below(2)] or [n - 1]
    assert gh.hausdorff_ultra(X, A, B) == gh.hausdorff_direct(X, A, B)


def test_lower_bound_examples():
    D3 = equilateral(3, 1.0)
    assert gh.spectrum_lower_bound(D1, D3) == 0
    assert gh.ugh_structural(D1, D3).value == 1
    assert gh.curvature_lower_bound(D1, D3, 3) == 1
    assert gh.curvature_lower_bound(D1, D3, 2) == 0
    X = sample(11, "ultrametric", 4)
    assert gh.spectrum_lower_bound(X, X) == 0
    assert gh.curvature_lower_bound(X, X, 4) == 0
    assert gh.spectrum_lower_bound(D1, equilateral(2, 2.0)) == 2


@pytest.mark.parametrize("X, Y", ultrametric_pairs(40, seed=48))
def test_curvature_bound_is_tight_at_desk_scale(X, Y):
    u = gh.ugh_structural(X, Y).value
    assert gh.spectrum_lower_bound(X, Y) <= u + TOL
    assert gh.curvature_lower_bound(X, Y, max(len(X), len(Y)) + 1) == pytest.approx(u, abs=TOL)


# bounds

def test_bounds_examples():
    X = sample(12, "ultrametric", 4)
    for p in (1.0, 2.0, 3.5):
        rep = gh.dghp_bounds(X, point_space(), p)
        assert rep.exact
        assert rep.value == pytest.approx(coefficient(p) * diameter(X))
    for p in (1.0, INF):
        rep = gh.dghp_bounds(X, X, p)
        assert (rep.lower, rep.upper) == (0, 0)
        rep = gh.dghp_bounds(X, X.permuted([3, 1, 0, 2]), p)
        assert (rep.lower, rep.upper) == (0, 0)
    M = sample(12, "metric", 4)
    assert gh.dghp_bounds(M, M, 2).value == 0


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, INF])
@pytest.mark.parametrize("X, Y", small_pairs(25, seed=49, n_hi=4, kind="p_metric", p=2.0))
def test_bounds_sandwich_exact(X, Y, p):
    exact = gh.dghp_exact(X, Y, p).value
    rep = gh.dghp_bounds(X, Y, p, dgh=gh.dghp_exact(X, Y, 1).value)
    assert rep.lower - TOL <= exact <= rep.upper + TOL


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("X, Y", small_pairs(15, seed=50, n_hi=4, kind="p_metric", p=3.0))
def test_holder(X, Y, p):
    dgh = gh.dghp_exact(X, Y, 1).value
    dgp = gh.dghp_exact(X, Y, p).value
    M = max(diameter(X), diameter(Y))
    assert dgh <= dgp + TOL <= gh.holder_bound(dgh, M, p) + 2 * TOL


@pytest.mark.parametrize("p", [2.0, 3.0])
@pytest.mark.parametrize("X, Y", small_pairs(15, seed=51, n_hi=4, kind="p_metric", p=3.0))
def test_snowflake_isometry(X, Y, p):
    from pgh.projections import snowflake

    lhs = gh.dghp_exact(X, Y, p).value
    rhs = gh.dghp_exact(snowflake(X, p), snowflake(Y, p), 1).value ** (1 / p)
    assert lhs == pytest.approx(rhs, abs=1e-8)


def test_stability_factor():
    assert gh.stability_factor(1, 1, 2) == 1
    assert gh.stability_factor(5, 3, 2) == 2
    assert gh.stability_factor(5, 3, INF) == 1


# approximate isometries

def test_isometry_examples():
    X = sample(13, "metric", 4)
    assert gh.is_eps_p_isometry(np.arange(4), X, X, 0, 2)
    assert gh.is_eps_p_isometry([0, 0], D1, D1, 1, 1)
    assert not gh.is_eps_p_isometry([0, 0], D1, D1, 0.5, 1)


def test_strict_bound_fails_at_infinity():
    # a (1, inf)-isometry onto a point, yet u_GH equals 2^(1/inf)·1 exactly
    assert gh.is_eps_p_isometry([0, 0], D1, point_space(), 1.0, INF)
    assert gh.dghp_exact(D1, point_space(), INF).value == 1.0


BRIDGE_PAIRS = [
    (p, X, Y)
    for p, kind in ((1.0, "metric"), (2.0, "p_metric"), (INF, "ultrametric"))
    for X, Y in small_pairs(20, seed=52, n_hi=4, kind=kind, p=2.0)
]


@pytest.mark.parametrize("p, X, Y", BRIDGE_PAIRS)
def test_isometry_bridge(p, X, Y):
    # both spaces must be p-metric for the bridge to apply
    d = gh.dghp_exact(X, Y, p).value
    eps = d * (1 + 1e-6) + 1e-6
    assert gh.find_eps_p_isometry(X, Y, 2.0 ** inv(p) * eps, p) is not None
    # converse on the least ε admitting an (ε, p)-isometry
    cands = sorted({gh.dis_p_map(phi, X, Y, p) for phi in gh._all_maps(len(X), len(Y))} |
                   {float(v) for v in Y.dist.ravel()})
    least = next(e for e in cands if e > 0 and gh.find_eps_p_isometry(X, Y, e, p) is not None) if d > 0 else None
    if least is not None:
        assert d <= 2.0 ** inv(p) * least + TOL
        if p != INF:
            assert d < 2.0 ** inv(p) * least


@pytest.mark.parametrize("p", [1.0, 2.0, INF])
@pytest.mark.parametrize("k", range(20))
def test_approximation_bridge(p, k):
    rng = SplitMix64(5300 + k)
    kind = "ultrametric" if p == INF else "p_metric"
    X, Y = (sample(rng.next(), kind, 2 + rng.below(3), p=p) for _ in range(2))
    N = 1 + rng.below(3)
    xs = [rng.below(len(X)) for _ in range(N)]
    ys = [rng.below(len(Y)) for _ in range(N)]
    eps, delta = gh.approximation_parameters(X, Y, xs, ys, p)
    assert gh.dghp_exact(X, Y, p).value <= gh.approximation_bound(eps, delta, p) + TOL


def test_approximation_parameters_validation():
    with pytest.raises(ValueError):
        gh.approximation_parameters(D1, D1, [0], [0, 1], 1)
    assert gh.approximation_parameters(D1, D1, [0, 1], [0, 1], 2) == (0.0, 0.0)
    assert gh.approximation_bound(0.0, 0.3, 2) == pytest.approx(0.3)
    assert gh.approximation_bound(1.0, 0.0, 2) == pytest.approx(math.sqrt(2))


def test_report_validation():
    with pytest.raises(ValueError):
        gh.DistanceReport(2.0, 1.0, "bounds_only")
    rep = gh.DistanceReport(1.0, 2.0, "bounds_only")
    assert not rep.exact
    with pytest.raises(ValueError):
        rep.value
