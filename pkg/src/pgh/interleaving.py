"""Interleaving distances between finite ultrametric spaces."""

import math
from dataclasses import dataclass

import numpy as np

from ._config import EPS, BudgetExceeded, budget
from .dendrograms import closed_classes, require_ultrametric
from .gh import _all_maps, merged_spectrum
from .parith import INF, a_p, coefficient


@dataclass(frozen=True)
class InterleavingReport:
    value: float
    witness_phi: tuple
    witness_psi: tuple


def dis_I_p(phi, X, Y, p: float) -> float:
    """max over pairs of A_p(u_Y(φx, φx'), u_X(x, x')): how far φ expands distances."""
    phi = np.asarray(phi)
    return float(np.max(a_p(Y.dist[np.ix_(phi, phi)], X.dist, p)))


def codis_I_p(phi, psi, X, Y, p: float) -> float:
    phi, psi = np.asarray(phi), np.asarray(psi)
    back_x = X.dist[np.arange(len(X)), psi[phi]].max()
    back_y = Y.dist[np.arange(len(Y)), phi[psi]].max()
    return coefficient(p) * float(max(back_x, back_y))


def _expansions(maps, dX, dY, p):
    out = np.empty(len(maps))
    for start in range(0, len(maps), 4096):
        chunk = maps[start:start + 4096]
        img = dY[chunk[:, :, None], chunk[:, None, :]]
        out[start:start + len(chunk)] = a_p(img, dX[None], p).reshape(len(chunk), -1).max(axis=1)
    return out


def interleaving_distance(X, Y, p: float, limit: int = None) -> InterleavingReport:
    """min over map pairs of max(dis_I,p(φ), dis_I,p(ψ), codis_I,p(φ, ψ)).

    Candidates are visited in order of increasing dis_I,p(φ) and pruned once
    that alone reaches the incumbent, which keeps the search exact.
    """
    require_ultrametric(X, "X")
    require_ultrametric(Y, "Y")
    m, n = len(X), len(Y)
    limit = budget() if limit is None else limit
    if m * math.log(n) + n * math.log(m) > math.log(limit) + 1e-12:
        raise BudgetExceeded(f"map-pair enumeration needs {n}^{m}·{m}^{n} candidates, budget is {limit}")
    dX, dY = X.dist, Y.dist
    phis, psis = _all_maps(m, n), _all_maps(n, m)
    ephi = _expansions(phis, dX, dY, p)
    epsi = _expansions(psis, dY, dX, p)
    order = np.argsort(epsi, kind="stable")
    psis, epsi = psis[order], epsi[order]
    c = coefficient(p)
    xs, ys = np.arange(m), np.arange(n)
    best, arg = INF, None
    for i in np.argsort(ephi, kind="stable"):
        if ephi[i] >= best:
            break
        usable = int(np.searchsorted(epsi, best, side="left"))
        if usable == 0:
            break
        phi = phis[i]
        cand = psis[:usable]
        back_x = dX[xs, cand[:, phi]].max(axis=1)     # u_X(x, ψφx)
        back_y = dY[ys, phi[cand]].max(axis=1)        # u_Y(y, φψy)
        total = np.maximum(np.maximum(c * np.maximum(back_x, back_y), epsi[:usable]), ephi[i])
        j = int(np.argmin(total))
        if total[j] < best:
            best, arg = float(total[j]), (tuple(int(v) for v in phi), tuple(int(v) for v in cand[j]))
    return InterleavingReport(best, *arg)


def check_eps_interleaved(X, Y, phi, psi, eps: float, tol: float = EPS) -> bool:
    """Pointwise ε-interleaving test for a given map pair."""
    phi, psi = np.asarray(phi), np.asarray(psi)
    dX, dY = X.dist, Y.dist
    if np.any(dY[np.ix_(phi, phi)] > dX + eps + tol):
        return False
    if np.any(dX[np.ix_(psi, psi)] > dY + eps + tol):
        return False
    if np.any(dX[np.arange(len(X)), psi[phi]] > 2 * eps + tol):
        return False
    if np.any(dY[np.arange(len(Y)), phi[psi]] > 2 * eps + tol):
        return False
    return True


def check_eps_interleaved_blocks(X, Y, phi, psi, eps: float) -> bool:
    """Same test phrased on dendrogram blocks.

    For every level t in the merged spectrum (blocks only change there):
    φ[x]_t ⊆ [φx]_{t+ε}, ψ[y]_t ⊆ [ψy]_{t+ε}, ψφ[x]_t ⊆ [x]_{t+2ε}, φψ[y]_t ⊆ [y]_{t+2ε}.
    """
    phi, psi = np.asarray(phi), np.asarray(psi)

    def owners(space, t):
        return {i: k for k, blk in enumerate(closed_classes(space.dist, t)) for i in blk}

    def inside(images, owner, target):
        return all(owner[j] == owner[target] for j in images)

    for t in merged_spectrum(X, Y):
        bx, by = closed_classes(X.dist, t), closed_classes(Y.dist, t)
        oy1, ox1 = owners(Y, t + eps), owners(X, t + eps)
        ox2, oy2 = owners(X, t + 2 * eps), owners(Y, t + 2 * eps)
        for blk in bx:
            for x in blk:
                if not inside(phi[blk], oy1, phi[x]) or not inside(psi[phi[blk]], ox2, x):
                    return False
        for blk in by:
            for y in blk:
                if not inside(psi[blk], ox1, psi[y]) or not inside(phi[psi[blk]], oy2, y):
                    return False
    return True


def find_interleaving(X, Y, eps: float, limit: int = None):
    """Some map pair witnessing an ε-interleaving, or None (exhaustive)."""
    m, n = len(X), len(Y)
    limit = budget() if limit is None else limit
    if m * math.log(n) + n * math.log(m) > math.log(limit) + 1e-12:
        raise BudgetExceeded(f"map-pair enumeration needs {n}^{m}·{m}^{n} candidates, budget is {limit}")
    for phi in _all_maps(m, n):
        for psi in _all_maps(n, m):
            if check_eps_interleaved(X, Y, phi, psi, eps):
                return phi, psi
    return None
