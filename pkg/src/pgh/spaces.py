"""Finite metric spaces as labelled dense distance matrices."""

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._config import EPS, BudgetExceeded, StructureError, budget
from .parith import INF, p_sum


class FiniteMetricSpace:
    """Labelled finite metric space.

    The distance matrix is copied, frozen and checked for shape, symmetry,
    zero diagonal and strictly positive off-diagonal entries. Triangle
    inequalities are *not* checked here; see :func:`validate`.
    """

    __slots__ = ("_labels", "_dist", "_index")

    def __init__(self, labels, dist, symmetrize=False):
        labels = tuple(str(lab) for lab in labels)
        d = np.array(dist, dtype=float, copy=True)
        n = len(labels)
        if n == 0:
            raise StructureError("a space needs at least one point")
        if len(set(labels)) != n:
            raise StructureError("labels must be distinct")
        if d.shape != (n, n):
            raise StructureError(f"matrix shape {d.shape} does not match {n} labels")
        if not np.all(np.isfinite(d)):
            raise StructureError("matrix has non-finite entries")
        if np.any(d < 0):
            i, j = np.argwhere(d < 0)[0]
            raise StructureError(f"negative distance between {labels[i]!r} and {labels[j]!r}")
        if np.any(np.diag(d) != 0):
            i = int(np.flatnonzero(np.diag(d))[0])
            raise StructureError(f"nonzero diagonal entry at {labels[i]!r}")
        asym = np.abs(d - d.T)
        if symmetrize:
            if np.any(asym > EPS):
                i, j = np.argwhere(asym > EPS)[0]
                raise StructureError(f"asymmetric matrix at ({labels[i]!r}, {labels[j]!r})")
            d = (d + d.T) / 2.0
        elif np.any(asym > 0):
            i, j = np.argwhere(asym > 0)[0]
            raise StructureError(f"asymmetric matrix at ({labels[i]!r}, {labels[j]!r})")
        off = ~np.eye(n, dtype=bool)
        if np.any(d[off] == 0):
            i, j = np.argwhere((d == 0) & off)[0]
            raise StructureError(f"zero distance between distinct points {labels[i]!r} and {labels[j]!r}")
        d.setflags(write=False)
        self._labels = labels
        self._dist = d
        self._index = {lab: i for i, lab in enumerate(labels)}

    @property
    def labels(self):
        return self._labels

    @property
    def dist(self):
        return self._dist

    def __len__(self):
        return len(self._labels)

    def index(self, label) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise KeyError(f"unknown point {label!r}") from None

    def d(self, a, b) -> float:
        return float(self._dist[self.index(a), self.index(b)])

    def scaled(self, c: float) -> "FiniteMetricSpace":
        if not c > 0:
            raise ValueError("scale factor must be positive")
        return FiniteMetricSpace(self._labels, c * self._dist)

    def relabeled(self, labels) -> "FiniteMetricSpace":
        return FiniteMetricSpace(labels, self._dist)

    def permuted(self, order) -> "FiniteMetricSpace":
        order = list(order)
        return FiniteMetricSpace([self._labels[i] for i in order], self._dist[np.ix_(order, order)])

    def subspace(self, indices) -> "FiniteMetricSpace":
        return self.permuted(indices)

    def allclose(self, other, tol=EPS) -> bool:
        return (
            self._labels == other.labels
            and bool(np.all(np.abs(self._dist - other.dist) <= tol))
        )

    def to_dict(self) -> dict:
        return {"labels": list(self._labels), "matrix": self._dist.tolist()}

    def __repr__(self):
        return f"FiniteMetricSpace(n={len(self)}, diameter={diameter(self):.6g})"


# ---------------------------------------------------------------- builders

def point_space(label="*") -> FiniteMetricSpace:
    return FiniteMetricSpace([label], [[0.0]])


def equilateral(n: int, a: float, prefix="x") -> FiniteMetricSpace:
    """Δ_n(a): n points, all pairwise distances equal to a."""
    d = np.full((n, n), float(a))
    np.fill_diagonal(d, 0.0)
    return FiniteMetricSpace([f"{prefix}{i}" for i in range(n)], d)


def line_space(points, labels=None) -> FiniteMetricSpace:
    """Points on the real line with |s - t| distances."""
    pts = np.asarray(points, dtype=float)
    if labels is None:
        labels = [f"{v:g}" for v in pts]
    return FiniteMetricSpace(labels, np.abs(pts[:, None] - pts[None, :]))


# -------------------------------------------------------------- validation

@dataclass(frozen=True)
class Validation:
    """Outcome of a p-triangle check.

    `triple` is the lexicographically first (x, x', x'') with
    d(x, x'') > d(x, x') ⊞_p d(x', x'') + EPS, and `slack` the excess.
    """

    ok: bool
    p: float
    triple: tuple = None
    slack: float = 0.0


@dataclass(frozen=True)
class SpaceClass:
    verified_p: float


def validate(space: FiniteMetricSpace, p: float, eps: float = EPS) -> Validation:
    d = space.dist
    n = len(space)
    if p == INF and n > 2:
        # d <= single linkage + eps implies every triple holds; only failures need the cubic scan
        from .projections import minimax_mst

        if np.all(d <= minimax_mst(d) + eps):
            return Validation(True, p)
    best = None
    for k in range(n):
        bound = p_sum(d[:, k][:, None], d[k, :][None, :], p)
        excess = d - bound
        bad = np.argwhere(excess > eps)
        if len(bad):
            i, j = bad[0]
            cand = (int(i), k, int(j))
            if best is None or cand < best[0]:
                best = (cand, float(excess[i, j]))
    if best is None:
        return Validation(True, p)
    (i, k, j), slack = best
    labels = space.labels
    return Validation(False, p, (labels[i], labels[k], labels[j]), slack)


def classify(space: FiniteMetricSpace, p: float = None) -> SpaceClass:
    """Largest exponent among {1, p, inf} whose triangle inequality holds.

    Returns ``SpaceClass(0.0)`` when even the ordinary triangle inequality fails.
    """
    candidates = sorted({1.0, INF} | ({float(p)} if p is not None else set()), reverse=True)
    for q in candidates:
        if validate(space, q).ok:
            return SpaceClass(q)
    return SpaceClass(0.0)


def is_p_metric(space, p) -> bool:
    return validate(space, p).ok


def is_ultrametric(space) -> bool:
    return validate(space, INF).ok


# --------------------------------------------------------------- invariants

def diameter(space) -> float:
    return float(space.dist.max())


def separation(space) -> float:
    if len(space) < 2:
        raise ValueError("separation of a one-point space is undefined")
    d = space.dist
    return float(d[~np.eye(len(space), dtype=bool)].min())


def spectrum(space) -> list:
    """Sorted distinct distance values, 0 included."""
    return [float(v) for v in np.unique(space.dist)]


def spectrum_eps(space, eps: float) -> list:
    return [t for t in spectrum(space) if t >= eps]


def curvature_set(space, n: int, limit: int = None) -> set:
    """All n×n distance matrices realised by n-tuples of points, as nested tuples."""
    if n < 1:
        raise ValueError("curvature set order must be >= 1")
    limit = budget() if limit is None else limit
    size = len(space)
    if n * math.log(size) > math.log(limit) + 1e-12:
        raise BudgetExceeded(f"curvature set needs {size}^{n} tuples, budget is {limit}")
    d = space.dist
    out = set()
    for tup in itertools.product(range(size), repeat=n):
        sub = d[np.ix_(tup, tup)]
        out.add(tuple(map(tuple, sub.tolist())))
    return out


# ---------------------------------------------------------------------- I/O

def from_dict(data) -> FiniteMetricSpace:
    try:
        labels = data["labels"]
        matrix = data["matrix"]
    except (KeyError, TypeError):
        raise StructureError('space JSON needs "labels" and "matrix" keys') from None
    return FiniteMetricSpace(labels, matrix, symmetrize=True)


def parse_csv(text: str) -> FiniteMetricSpace:
    rows = [r for r in csv.reader(io.StringIO(text)) if any(c.strip() for c in r)]
    if not rows:
        raise StructureError("empty CSV")
    labels = [c.strip() for c in rows[0]]
    try:
        matrix = [[float(c) for c in r] for r in rows[1:]]
    except ValueError as exc:
        raise StructureError(f"non-numeric CSV entry: {exc}") from None
    return FiniteMetricSpace(labels, matrix, symmetrize=True)


def load(path) -> FiniteMetricSpace:
    """Read a space from a .json or .csv file (format chosen by suffix, JSON otherwise)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".csv":
        return parse_csv(text)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureError(f"{path}: invalid JSON ({exc})") from None
    return from_dict(data)


def dumps(space, digits=12) -> str:
    matrix = [[float(f"{v:.{digits}g}") for v in row] for row in space.dist.tolist()]
    return json.dumps({"labels": list(space.labels), "matrix": matrix})


def to_csv(space, digits=12) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(space.labels)
    for row in space.dist.tolist():
        writer.writerow([f"{v:.{digits}g}" for v in row])
    return buf.getvalue()
