"""Projection of a finite metric space onto the p-metric spaces.

The projected distance between two points is the smallest p-sum of step
lengths over all chains of points joining them. At p = inf this is the
minimax path cost, i.e. the single-linkage ultrametric.
"""

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

from ._config import EPS
from .parith import INF, p_sum
from .spaces import FiniteMetricSpace


@dataclass(frozen=True)
class ProjectionResult:
    space: FiniteMetricSpace
    # blocks of original labels glued together because their projected distance vanished
    collapsed: tuple


def path_closure(dist, p: float) -> np.ndarray:
    """Floyd–Warshall over the (min, ⊞_p) semiring.

    Because ⊞_p is associative and monotone, relaxing through each pivot in
    turn yields the infimum over all chains; at p = inf it is the max-min
    closure.
    """
    d = np.array(dist, dtype=float, copy=True)
    for k in range(d.shape[0]):
        through = p_sum(d[:, k][:, None], d[k, :][None, :], p)
        np.minimum(d, through, out=d)
    np.fill_diagonal(d, 0.0)
    return np.minimum(d, d.T)


def minimax_mst(dist) -> np.ndarray:
    """Single-linkage ultrametric via Kruskal.

    When two components merge along an MST edge of weight w, every pair
    across them gets w, which is the maximum edge on their tree path.
    """
    d = np.asarray(dist, dtype=float)
    n = d.shape[0]
    out = np.zeros((n, n))
    iu, ju = np.triu_indices(n, k=1)
    order = np.argsort(d[iu, ju], kind="stable")
    parent = list(range(n))
    members = {i: [i] for i in range(n)}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    merged = 0
    for e in order:
        if merged == n - 1:
            break
        a, b = find(iu[e]), find(ju[e])
        if a == b:
            continue
        w = d[iu[e], ju[e]]
        ma, mb = members[a], members[b]
        out[np.ix_(ma, mb)] = w
        out[np.ix_(mb, ma)] = w
        if len(ma) < len(mb):
            a, b, ma, mb = b, a, mb, ma
        parent[b] = a
        ma.extend(mb)
        del members[b]
        merged += 1
    return out


def _collapse(labels, d):
    n = len(labels)
    _, comp = connected_components(d <= EPS, directed=False)
    blocks = {}
    for i, c in enumerate(comp):
        blocks.setdefault(c, []).append(i)
    groups = sorted(blocks.values(), key=lambda g: g[0])
    if len(groups) == n:
        return FiniteMetricSpace(labels, d), tuple((lab,) for lab in labels)
    reps = [g[0] for g in groups]
    names = ["+".join(sorted(labels[i] for i in g)) for g in groups]
    collapsed = tuple(tuple(sorted(labels[i] for i in g)) for g in groups)
    return FiniteMetricSpace(names, d[np.ix_(reps, reps)]), collapsed


def project(space: FiniteMetricSpace, p: float) -> ProjectionResult:
    if p == INF:
        d = minimax_mst(space.dist)
    else:
        d = path_closure(space.dist, p)
    out, collapsed = _collapse(space.labels, d)
    return ProjectionResult(out, collapsed)


def single_linkage(space: FiniteMetricSpace) -> FiniteMetricSpace:
    return project(space, INF).space


def snowflake(space: FiniteMetricSpace, power: float) -> FiniteMetricSpace:
    """Raise every distance to `power` (> 0)."""
    if not power > 0:
        raise ValueError("snowflake power must be positive")
    return FiniteMetricSpace(space.labels, np.power(space.dist, power))


def project_composition_check(space, q: float, p: float, tol: float = EPS) -> bool:
    """Whether projecting to q then to p agrees with projecting straight to p (q < p)."""
    if not q < p:
        raise ValueError(f"composition check needs q < p, got q={q}, p={p}")
    twice = project(project(space, q).space, p).space
    once = project(space, p).space
    return once.allclose(twice, tol)
