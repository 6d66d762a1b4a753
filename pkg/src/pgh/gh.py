"""p-Gromov–Hausdorff distances between finite spaces.

Exact values come from exhaustive search, which is only feasible for a
handful of points. Between ultrametric spaces the p = inf distance is
computed in polynomial time by comparing closed quotients.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ._config import EPS, BudgetExceeded, InvalidCorrespondence, budget, snap
from .dendrograms import ClusterTree, closed_classes, require_ultrametric
from .parith import INF, coefficient, inv, lambda_p, p_sum
from .spaces import curvature_set, diameter, is_p_metric, is_ultrametric, spectrum


# ------------------------------------------------------------------ types

class Correspondence(frozenset):
    """Set of (i, j) index pairs between X and Y."""

    def check(self, m: int, n: int) -> "Correspondence":
        xs = {i for i, _ in self}
        ys = {j for _, j in self}
        if any(not (0 <= i < m and 0 <= j < n) for i, j in self):
            raise InvalidCorrespondence("pair index out of range")
        missing_x = sorted(set(range(m)) - xs)
        if missing_x:
            raise InvalidCorrespondence(f"point {missing_x[0]} of X is not covered")
        missing_y = sorted(set(range(n)) - ys)
        if missing_y:
            raise InvalidCorrespondence(f"point {missing_y[0]} of Y is not covered")
        return self

    @classmethod
    def from_maps(cls, phi, psi) -> "Correspondence":
        return cls({(i, int(j)) for i, j in enumerate(phi)} | {(int(i), j) for j, i in enumerate(psi)})

    @classmethod
    def from_blocks(cls, pairs) -> "Correspondence":
        return cls({(i, j) for bx, by in pairs for i in bx for j in by})

    def labelled(self, X, Y):
        return sorted((X.labels[i], Y.labels[j]) for i, j in self)


@dataclass(frozen=True)
class DistanceReport:
    lower: float
    upper: float
    method: str  # "exact_enumeration" | "structural" | "bounds_only"
    witness: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.lower > self.upper + EPS:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    @property
    def exact(self) -> bool:
        return self.method != "bounds_only" or abs(self.upper - self.lower) <= EPS

    @property
    def value(self) -> float:
        if not self.exact:
            raise ValueError("only an interval is known")
        return self.upper


def _exact(value, method, **witness):
    return DistanceReport(value, value, method, witness)


# ------------------------------------------------------------ distortions

def dis_p(corr, X, Y, p: float) -> float:
    pairs = sorted(Correspondence(corr).check(len(X), len(Y)))
    if not pairs:
        return 0.0
    ix = np.array([i for i, _ in pairs])
    iy = np.array([j for _, j in pairs])
    return float(np.max(lambda_p(X.dist[np.ix_(ix, ix)], Y.dist[np.ix_(iy, iy)], p)))


def dis_p_map(phi, X, Y, p: float) -> float:
    phi = np.asarray(phi)
    return float(np.max(lambda_p(X.dist, Y.dist[np.ix_(phi, phi)], p)))


def codis_p(phi, psi, X, Y, p: float) -> float:
    phi, psi = np.asarray(phi), np.asarray(psi)
    # entry (x, y): Λ_p(d_X(x, ψ(y)), d_Y(φ(x), y))
    return float(np.max(lambda_p(X.dist[:, psi], Y.dist[phi, :], p)))


def _all_maps(m, n):
    """Every map from an m-set to an n-set, one per row, lexicographic."""
    if m == 0:
        return np.zeros((1, 0), dtype=np.intp)
    return np.array(list(itertools.product(range(n), repeat=m)), dtype=np.intp)


def _map_budget(m, n, limit=None):
    limit = budget() if limit is None else limit
    cost = m * math.log(n) + n * math.log(m)
    if cost > math.log(limit) + 1e-12:
        raise BudgetExceeded(
            f"map-pair enumeration needs {n}^{m}·{m}^{n} candidates, budget is {limit}; "
            "use bounds or the structural method"
        )


def _map_distortions(maps, dX, dY, p):
    out = np.empty(len(maps))
    for start in range(0, len(maps), 4096):
        chunk = maps[start:start + 4096]
        img = dY[chunk[:, :, None], chunk[:, None, :]]
        out[start:start + len(chunk)] = lambda_p(dX[None], img, p).reshape(len(chunk), -1).max(axis=1)
    return out


# ------------------------------------------------------------ exact search

def _min_distortion_clique(X, Y, p):
    """Smallest p-distortion over all correspondences, with a minimiser.

    Binary search over the finitely many candidate values; feasibility of a
    threshold t is a covering-clique search on the pairs (x, y), where two
    pairs are compatible when their distances differ by at most t.
    """
    m, n = len(X), len(Y)
    L = lambda_p(X.dist[:, :, None, None], Y.dist[None, None, :, :], p)
    # L[x, x', y, y'] -> node-pair tensor over (x, y), (x', y')
    pair = L.transpose(0, 2, 1, 3).reshape(m * n, m * n)
    values = np.unique(pair)
    row_mask = [sum(1 << (x * n + y) for y in range(n)) for x in range(m)]
    col_mask = [sum(1 << (x * n + y) for x in range(m)) for y in range(n)]

    def feasible(t):
        ok = pair <= t
        compat = [int(sum(1 << k for k in np.flatnonzero(ok[a]))) for a in range(m * n)]
        need = [("x", x, row_mask[x]) for x in range(m)] + [("y", y, col_mask[y]) for y in range(n)]

        def search(allowed, chosen, covered):
            best = None
            for key, idx, mask in need:
                if covered & mask:
                    continue
                opts = allowed & mask
                cnt = bin(opts).count("1")
                if best is None or cnt < best[0]:
                    best = (cnt, opts)
                    if cnt == 0:
                        return None
            if best is None:
                return chosen
            opts = best[1]
            while opts:
                low = opts & -opts
                k = low.bit_length() - 1
                opts ^= low
                res = search(allowed & compat[k], chosen | low, covered | low)
                if res is not None:
                    return res
            return None

        return search((1 << (m * n)) - 1, 0, 0)

    lo, hi = 0, len(values) - 1
    found = feasible(values[hi])
    while lo < hi:
        mid = (lo + hi) // 2
        res = feasible(values[mid])
        if res is not None:
            hi, found = mid, res
        else:
            lo = mid + 1
    corr = Correspondence({divmod(k, n) for k in range(m * n) if found >> k & 1})
    return float(values[lo]), corr


def dghp_exact(X, Y, p: float, limit: int = None) -> DistanceReport:
    """d_GH^(p) as 2^(-1/p) times the least p-distortion of a correspondence."""
    m, n = len(X), len(Y)
    _map_budget(m, n, limit)
    best, corr = _min_distortion_clique(X, Y, p)
    return _exact(coefficient(p) * best, "exact_enumeration", correspondence=corr)


def dghp_bruteforce(X, Y, p: float) -> float:
    """Reference value by scanning every subset of X×Y (only for #X·#Y <= 20)."""
    m, n = len(X), len(Y)
    if m * n > 20:
        raise BudgetExceeded(f"raw subset enumeration limited to #X·#Y <= 20, got {m * n}")
    nodes = [(x, y) for x in range(m) for y in range(n)]
    L = lambda_p(X.dist[:, :, None, None], Y.dist[None, None, :, :], p)
    best = INF
    for mask in range(1, 1 << len(nodes)):
        chosen = [nodes[k] for k in range(len(nodes)) if mask >> k & 1]
        if {x for x, _ in chosen} != set(range(m)) or {y for _, y in chosen} != set(range(n)):
            continue
        val = max(float(L[a[0], b[0], a[1], b[1]]) for a in chosen for b in chosen)
        best = min(best, val)
    return coefficient(p) * best


def dghp_via_maps(X, Y, p: float, limit: int = None, return_maps: bool = False):
    """d_GH^(p) through the map formula max(dis φ, dis ψ, codis(φ, ψ))."""
    m, n = len(X), len(Y)
    _map_budget(m, n, limit)
    dX, dY = X.dist, Y.dist
    phis, psis = _all_maps(m, n), _all_maps(n, m)
    dphi = _map_distortions(phis, dX, dY, p)
    dpsi = _map_distortions(psis, dY, dX, p)
    best, arg = INF, None
    order_psi = np.argsort(dpsi, kind="stable")
    psis, dpsi = psis[order_psi], dpsi[order_psi]
    # codis tensor pieces: dX[x, ψ(y)] for each ψ -> (Kψ, m, n)
    left_all = dX[:, psis].transpose(1, 0, 2)
    for i in np.argsort(dphi, kind="stable"):
        if dphi[i] >= best:
            break
        usable = int(np.searchsorted(dpsi, best, side="left"))
        if usable == 0:
            break
        right = dY[phis[i], :]  # (m, n)
        cod = lambda_p(left_all[:usable], right[None], p).reshape(usable, -1).max(axis=1)
        total = np.maximum(np.maximum(cod, dpsi[:usable]), dphi[i])
        j = int(np.argmin(total))
        if total[j] < best:
            best, arg = float(total[j]), (phis[i].copy(), psis[j].copy())
    value = coefficient(p) * best
    if return_maps:
        return value, arg
    return value


# -------------------------------------------------------- ultrametric case

def merged_spectrum(X, Y) -> list:
    """{0} ∪ spec(X) ∪ spec(Y), deduplicated on the EPS grid."""
    vals = sorted({0.0, *spectrum(X), *spectrum(Y)})
    out = []
    for v in vals:
        if not out or snap(v) != snap(out[-1]):
            out.append(v)
    return out


def ugh_structural(X, Y, linear: bool = False) -> DistanceReport:
    """u_GH as the least level whose closed quotients are isometric.

    Quotients only change at spectrum values and isometry at t persists
    for every s >= t, so a binary search over the merged spectrum is exact.
    `linear` switches to a full scan, kept for cross-checking.
    """
    require_ultrametric(X, "X")
    require_ultrametric(Y, "Y")
    tx, ty = ClusterTree.of(X), ClusterTree.of(Y)
    levels = merged_spectrum(X, Y)

    def same(t):
        return tx.signature(t) == ty.signature(t)

    if linear:
        k = next(i for i, t in enumerate(levels) if same(t))
    else:
        lo, hi = 0, len(levels) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if same(levels[mid]):
                hi = mid
            else:
                lo = mid + 1
        k = lo
    t = levels[k]
    corr = Correspondence.from_blocks(tx.match(ty, t))
    return _exact(t, "structural", level=t, correspondence=corr)


def ugh_hat(X, Y, limit: int = None) -> float:
    """max(min_φ dis_∞(φ), min_ψ dis_∞(ψ)): the codistortion-free variant."""
    m, n = len(X), len(Y)
    limit = budget() if limit is None else limit
    if m * math.log(n) > math.log(limit) + 1e-12 or n * math.log(m) > math.log(limit) + 1e-12:
        raise BudgetExceeded(f"map enumeration needs {n}^{m} + {m}^{n} candidates, budget is {limit}")
    a = _map_distortions(_all_maps(m, n), X.dist, Y.dist, INF).min()
    b = _map_distortions(_all_maps(n, m), Y.dist, X.dist, INF).min()
    return float(max(a, b))


def _subset_indices(space, subset):
    idx = []
    for s in subset:
        idx.append(int(s) if isinstance(s, (int, np.integer)) else space.index(s))
    if not idx:
        raise ValueError("subsets must be non-empty")
    return sorted(set(idx))


def hausdorff_direct(space, A, B) -> float:
    a, b = _subset_indices(space, A), _subset_indices(space, B)
    sub = space.dist[np.ix_(a, b)]
    return float(max(sub.min(axis=1).max(), sub.min(axis=0).max()))


def hausdorff_ultra(space, A, B) -> float:
    """Least t in the spectrum at which A and B meet the same closed classes."""
    a, b = _subset_indices(space, A), _subset_indices(space, B)
    for t in spectrum(space):
        blocks = closed_classes(space.dist, t)
        owner = {i: k for k, blk in enumerate(blocks) for i in blk}
        if {owner[i] for i in a} == {owner[i] for i in b}:
            return t
    raise AssertionError("unreachable: the top level always has a single class")


def spectrum_lower_bound(X, Y) -> float:
    """inf{ε : spec_ε(X) = spec_ε(Y)}, i.e. the largest value in only one spectrum."""
    sx = {snap(v): v for v in spectrum(X)}
    sy = {snap(v): v for v in spectrum(Y)}
    diff = [sx.get(k, sy.get(k)) for k in set(sx) ^ set(sy)]
    return max(diff, default=0.0)


def _snapped_curvature(space, n, limit):
    return {tuple(tuple(snap(v) for v in row) for row in mat) for mat in curvature_set(space, n, limit)}


def curvature_lower_bound(X, Y, n_max: int, limit: int = None) -> float:
    """max over n <= n_max of the least level where the order-n curvature sets of the quotients agree."""
    from .dendrograms import closed_quotient

    require_ultrametric(X, "X")
    require_ultrametric(Y, "Y")
    levels = merged_spectrum(X, Y)
    best = 0.0
    for order in range(1, n_max + 1):
        for t in levels:
            if t < best:
                continue
            kx = _snapped_curvature(closed_quotient(X, t), order, limit)
            ky = _snapped_curvature(closed_quotient(Y, t), order, limit)
            if kx == ky:
                best = max(best, t)
                break
    return best


# ------------------------------------------------------------------ bounds

def holder_bound(dgh: float, M: float, p: float) -> float:
    """Upper bound on d_GH^(p) from d_GH for p-metric inputs (finite p)."""
    c = math.ceil(p)
    return c ** (1.0 / c) * (2.0 * M) ** (1.0 - 1.0 / c) * dgh ** (1.0 / c)


def dghp_bounds(X, Y, p: float, dgh: float = None) -> DistanceReport:
    """Interval for d_GH^(p) without enumeration.

    Identical matrices and isometric ultrametrics give [0, 0].
    Lower: 2^(-1/p)Λ_p(diam X, diam Y); at p = inf between ultrametrics also the
    spectrum bound. Upper: 2^(-1/p)max(diam X, diam Y); when `dgh` (the p = 1
    value) is supplied and both spaces are p-metric, also the Hölder bound,
    and `dgh` itself becomes a lower bound.
    """
    if len(X) == len(Y) and np.array_equal(X.dist, Y.dist):
        return _exact(0.0, "bounds_only")
    ultra = is_ultrametric(X) and is_ultrametric(Y)
    if ultra and ClusterTree.of(X).signature() == ClusterTree.of(Y).signature():
        return _exact(0.0, "bounds_only")
    dx, dy = diameter(X), diameter(Y)
    c = coefficient(p)
    lower = c * lambda_p(dx, dy, p)
    upper = c * max(dx, dy)
    notes = {"diameter_lower": lower, "diameter_upper": upper}
    if p == INF and ultra:
        sb = spectrum_lower_bound(X, Y)
        notes["spectrum_lower"] = sb
        lower = max(lower, sb)
    if dgh is not None:
        lower = max(lower, dgh)
        if p != INF and is_p_metric(X, p) and is_p_metric(Y, p):
            hb = holder_bound(dgh, max(dx, dy), p)
            notes["holder_upper"] = hb
            upper = min(upper, hb)
    return DistanceReport(min(lower, upper), upper, "bounds_only", notes)


def stability_factor(m: int, n: int, p: float) -> float:
    """(max(m, n) - 1)^(1/p): Lipschitz factor of the p-projection on small spaces."""
    return float(max(m, n) - 1) ** inv(p) if max(m, n) > 1 else 1.0


# ---------------------------------------------------------- approximations

def is_eps_p_isometry(f, X, Y, eps: float, p: float, tol: float = EPS) -> bool:
    f = np.asarray(f)
    if dis_p_map(f, X, Y, p) > eps + tol:
        return False
    reach = Y.dist[:, np.unique(f)].min(axis=1)
    return bool(np.all(reach <= eps + tol))


def find_eps_p_isometry(X, Y, eps: float, p: float, limit: int = None):
    """Some (eps, p)-isometry X -> Y as an index array, or None."""
    m, n = len(X), len(Y)
    limit = budget() if limit is None else limit
    if m * math.log(n) > math.log(limit) + 1e-12:
        raise BudgetExceeded(f"map enumeration needs {n}^{m} candidates, budget is {limit}")
    for phi in _all_maps(m, n):
        if is_eps_p_isometry(phi, X, Y, eps, p):
            return phi
    return None


def net_radius(space, subset) -> float:
    """Smallest r such that `subset` is an r-net of the space."""
    idx = _subset_indices(space, subset)
    return float(space.dist[:, idx].min(axis=1).max())


def approximation_parameters(X, Y, xs, ys, p: float):
    """(ε, δ) for which the matched samples xs[i] <-> ys[i] form an (ε, δ, p)-approximation."""
    if len(xs) != len(ys) or not len(xs):
        raise ValueError("matched samples must be non-empty and of equal length")
    xs = [int(i) for i in xs]
    ys = [int(j) for j in ys]
    eps = max(net_radius(X, xs), net_radius(Y, ys))
    delta = float(np.max(lambda_p(X.dist[np.ix_(xs, xs)], Y.dist[np.ix_(ys, ys)], p)))
    return eps, delta


def approximation_bound(eps: float, delta: float, p: float) -> float:
    """δ ⊞_p 2^(1/p)ε, an upper bound on d_GH^(p) for (ε, δ, p)-approximations."""
    return float(p_sum(delta, 2.0 ** inv(p) * eps, p))
