"""Seeded property suite behind ``pgh selftest``.

Each property draws its own cases from a SplitMix64 stream derived from the
run seed, so a (seed, cases) pair always checks the same instances.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from . import dendrograms, gh, interleaving, parith, projections, spaces
from ._config import EPS
from .generators import SplitMix64, sample
from .parith import INF

P_VALUES = (1.0, 1.5, 2.0, 4.0, 8.0, INF)


@dataclass
class PropertyResult:
    name: str
    checked: int = 0
    failures: int = 0


def _ultra(rng, n_lo=2, n_hi=4, levels=4):
    n = n_lo + rng.below(n_hi - n_lo + 1)
    return sample(rng.next(), "ultrametric", n, levels=levels)


def _metric(rng, n_lo=2, n_hi=6):
    return sample(rng.next(), "metric", n_lo + rng.below(n_hi - n_lo + 1))


# ------------------------------------------------------------- properties

def lambda_monotone_in_p(rng, fixtures):
    a, b = sorted((rng.uniform(0.1, 10), rng.uniform(0.1, 10)), reverse=True)
    vals = [parith.lambda_p(a, b, p) for p in P_VALUES]
    return all(x <= y + EPS for x, y in zip(vals, vals[1:]))


def p_sum_antimonotone_in_p(rng, fixtures):
    a, b = rng.uniform(0, 10), rng.uniform(0, 10)
    vals = [parith.p_sum(a, b, p) for p in P_VALUES]
    return all(x + EPS >= y for x, y in zip(vals, vals[1:]))


def inverse_triangle(rng, fixtures):
    a, b, c = (rng.uniform(0, 10) for _ in range(3))
    p = P_VALUES[rng.below(len(P_VALUES))]
    lam = parith.lambda_p(b, c, p)
    if abs(a - lam) < 1e-7:
        return True  # too close to the boundary for floating point
    left = parith.p_sum(a, b, p) >= c and parith.p_sum(a, c, p) >= b
    return left == (a >= lam)


def snowflake_closure(rng, fixtures):
    X = _metric(rng)
    p = (2.0, 4.0, 64.0)[rng.below(3)]
    return spaces.validate(projections.snowflake(X, 1.0 / p), p).ok


def inclusion_chain(rng, fixtures):
    X = sample(rng.next(), "p_metric", 2 + rng.below(5), p=4.0)
    return all(spaces.validate(X, q).ok for q in (1.0, 2.0, 3.0, 4.0))


def curvature_relabel_invariance(rng, fixtures):
    X = fixtures[rng.below(len(fixtures))] if fixtures and rng.below(2) else _metric(rng, 2, 4)
    order = list(range(len(X)))
    for k in range(len(order) - 1, 0, -1):
        j = rng.below(k + 1)
        order[k], order[j] = order[j], order[k]
    if len(X) > 5:
        return True
    return spaces.curvature_set(X, 3) == spaces.curvature_set(X.permuted(order), 3)


def mst_equals_closure(rng, fixtures):
    X = _metric(rng, 2, 16)
    return bool(np.array_equal(projections.minimax_mst(X.dist), projections.path_closure(X.dist, INF)))


def projection_subdominant(rng, fixtures):
    X = _metric(rng)
    p = (1.5, 2.0, INF)[rng.below(3)]
    top = projections.project(X, p).space.dist
    # an unrelated p-metric, scaled until it sits below X
    kind = "ultrametric" if p == INF else "p_metric"
    Z = sample(rng.next(), kind, len(X), p=p).dist
    off = ~np.eye(len(X), dtype=bool)
    below = Z * (X.dist[off] / Z[off]).min() if len(X) > 1 else Z
    return bool(np.all(below <= top + EPS))


def projection_scale(rng, fixtures):
    X = _metric(rng)
    p = (1.0, 2.0, 3.0, INF)[rng.below(4)]
    c = rng.uniform(0.1, 10)
    lhs = projections.project(X.scaled(c), p).space.dist
    rhs = c * projections.project(X, p).space.dist
    return bool(np.allclose(lhs, rhs, rtol=1e-12, atol=EPS))


def dendrogram_bijection(rng, fixtures):
    X = sample(rng.next(), "ultrametric", 1 + rng.below(12))
    return dendrograms.from_dendrogram(dendrograms.to_dendrogram(X)).allclose(X)


def signature_soundness(rng, fixtures):
    X, Y = _ultra(rng, 2, 4, 2), _ultra(rng, 2, 4, 2)
    same = dendrograms.isometric_ultrametrics(X, Y)
    iso = len(X) == len(Y) and any(
        np.allclose(X.dist, Y.dist[np.ix_(perm, perm)], atol=EPS)
        for perm in itertools.permutations(range(len(Y)))
    )
    return same == iso


def ugh_oracles(rng, fixtures):
    X, Y = _ultra(rng), _ultra(rng)
    s = gh.ugh_structural(X, Y).value
    return abs(s - gh.dghp_exact(X, Y, INF).value) <= EPS and abs(s - gh.dghp_via_maps(X, Y, INF)) <= EPS


def dghp_p_triangle(rng, fixtures):
    p = (1.0, 2.0, INF)[rng.below(3)]
    X, Y, Z = (_metric(rng, 1, 3) for _ in range(3))
    d = lambda A, B: gh.dghp_exact(A, B, p).value  # noqa: E731
    return d(X, Y) <= parith.p_sum(d(X, Z), d(Z, Y), p) + EPS


def interleaving_at_inf(rng, fixtures):
    X, Y = _ultra(rng, 1, 3), _ultra(rng, 1, 3)
    return abs(interleaving.interleaving_distance(X, Y, INF).value - gh.ugh_structural(X, Y).value) <= EPS


def generated_isosceles(rng, fixtures):
    X = sample(rng.next(), "ultrametric", 1 + rng.below(10))
    d = X.dist
    for i, j, k in itertools.combinations(range(len(X)), 3):
        s = sorted((d[i, j], d[j, k], d[i, k]))
        if abs(s[1] - s[2]) > EPS:
            return False
    return len(spaces.spectrum(X)) <= len(X)


def fixture_projection_diameter(rng, fixtures):
    X = fixtures[rng.below(len(fixtures))] if fixtures else _metric(rng)
    p = (1.0, 2.0, INF)[rng.below(3)]
    return spaces.diameter(projections.project(X, p).space) <= spaces.diameter(X) + EPS


PROPERTIES = [
    ("parith.lambda_monotone_in_p", lambda_monotone_in_p, 1.0),
    ("parith.p_sum_antimonotone_in_p", p_sum_antimonotone_in_p, 1.0),
    ("parith.inverse_triangle", inverse_triangle, 1.0),
    ("spaces.snowflake_closure", snowflake_closure, 1.0),
    ("spaces.inclusion_chain", inclusion_chain, 1.0),
    ("spaces.curvature_relabel_invariance", curvature_relabel_invariance, 0.5),
    ("projections.mst_equals_closure", mst_equals_closure, 1.0),
    ("projections.subdominant", projection_subdominant, 1.0),
    ("projections.scale_equivariance", projection_scale, 1.0),
    ("projections.diameter_non_increase", fixture_projection_diameter, 1.0),
    ("dendrograms.bijection", dendrogram_bijection, 1.0),
    ("dendrograms.signature_soundness", signature_soundness, 1.0),
    ("gh.ugh_oracles", ugh_oracles, 0.5),
    ("gh.p_triangle", dghp_p_triangle, 0.5),
    ("interleaving.coincidence_at_inf", interleaving_at_inf, 0.5),
    ("generators.isosceles_and_spectrum", generated_isosceles, 1.0),
]


def run_selftest(seed: int = 0, cases: int = 50, fixtures=()) -> list:
    """Run every property; the expensive ones get a fraction of `cases`."""
    fixtures = list(fixtures)
    master = SplitMix64(seed)
    results = []
    for name, prop, share in PROPERTIES:
        rng = SplitMix64(master.next())
        res = PropertyResult(name)
        for _ in range(max(1, int(cases * share))):
            res.checked += 1
            if not prop(rng, fixtures):
                res.failures += 1
        results.append(res)
    return results
