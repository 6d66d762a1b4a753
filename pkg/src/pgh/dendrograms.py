"""Finite dendrograms, closed quotients and isometry signatures of ultrametrics.

Heights are compared on a grid of width EPS (see ``_config.snap``): two merge
heights closer than that are treated as the same merge.
"""

import json
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components, minimum_spanning_tree

from ._config import EPS, StructureError, TriangleViolation, snap
from .parith import INF
from .spaces import FiniteMetricSpace, validate


def require_ultrametric(space, what="space"):
    check = validate(space, INF)
    if not check.ok:
        a, b, c = check.triple
        raise TriangleViolation(
            f"{what} is not ultrametric: u({a},{c}) exceeds max(u({a},{b}), u({b},{c})) by {check.slack:.3g}",
            triple=check.triple,
            slack=check.slack,
        )


def closed_classes(dist, t: float) -> list:
    """Index blocks of the relation u <= t, ordered by smallest member."""
    n = dist.shape[0]
    grid = np.rint(np.asarray(dist) / EPS)
    _, comp = connected_components(grid <= snap(t), directed=False)
    blocks = {}
    for i in range(n):
        blocks.setdefault(comp[i], []).append(i)
    return sorted(blocks.values(), key=lambda b: b[0])


def block_label(labels) -> str:
    return "+".join(sorted(labels))


def closed_quotient(space: FiniteMetricSpace, t: float) -> FiniteMetricSpace:
    """The t-closed quotient: one point per class of u <= t, inter-class distances inherited."""
    if t < 0:
        raise ValueError("quotient level must be non-negative")
    blocks = closed_classes(space.dist, t)
    reps = [b[0] for b in blocks]
    names = [block_label([space.labels[i] for i in b]) for b in blocks]
    return FiniteMetricSpace(names, space.dist[np.ix_(reps, reps)])


# ------------------------------------------------------------ dendrograms

@dataclass(frozen=True)
class Dendrogram:
    """Chain of partitions of `leaves`.

    ``partitions[0]`` is the all-singletons partition at height 0 and
    ``partitions[k]`` (k >= 1) is the partition at ``heights[k - 1]``.
    Blocks are frozensets of labels.
    """

    leaves: tuple
    heights: tuple
    partitions: tuple

    def __post_init__(self):
        leaves = set(self.leaves)
        if len(leaves) != len(self.leaves) or not leaves:
            raise StructureError("dendrogram leaves must be distinct and non-empty")
        if len(self.partitions) != len(self.heights) + 1:
            raise StructureError("need one partition per height plus the height-0 partition")
        if any(h <= 0 for h in self.heights) or any(
            b <= a for a, b in zip(self.heights, self.heights[1:])
        ):
            raise StructureError("merge heights must be positive and strictly increasing")
        for part in self.partitions:
            seen = [x for block in part for x in block]
            if len(seen) != len(leaves) or set(seen) != leaves:
                raise StructureError("every partition must cover each leaf exactly once")
        if any(len(b) != 1 for b in self.partitions[0]):
            raise StructureError("partition at height 0 must be all singletons")
        for fine, coarse in zip(self.partitions, self.partitions[1:]):
            where = {x: k for k, block in enumerate(coarse) for x in block}
            if len(coarse) >= len(fine) or any(
                len({where[x] for x in b}) != 1 for b in fine
            ):
                raise StructureError("each partition must strictly coarsen the previous one")
        if len(self.partitions[-1]) != 1:
            raise StructureError("final partition must be a single block")

    def to_dict(self, digits=12) -> dict:
        order = {lab: i for i, lab in enumerate(self.leaves)}

        def blocks(part):
            bl = [sorted(b, key=order.get) for b in part]
            return sorted(bl, key=lambda b: order[b[0]])

        return {
            "leaves": list(self.leaves),
            "merges": [
                {"height": float(f"{h:.{digits}g}"), "blocks": blocks(part)}
                for h, part in zip(self.heights, self.partitions[1:])
            ],
        }

    @classmethod
    def from_dict(cls, data) -> "Dendrogram":
        try:
            leaves = tuple(str(x) for x in data["leaves"])
            merges = sorted(data["merges"], key=lambda m: float(m["height"]))
            heights = tuple(float(m["height"]) for m in merges)
            parts = [frozenset(frozenset(str(x) for x in b) for b in m["blocks"]) for m in merges]
        except (KeyError, TypeError, ValueError):
            raise StructureError('dendrogram JSON needs "leaves" and "merges" with "height"/"blocks"') from None
        base = frozenset(frozenset([x]) for x in leaves)
        return cls(leaves, heights, (base, *parts))


def merge_events(dist):
    """Merges of single linkage on the EPS grid, lowest first.

    Yields ``(height, groups)`` per distinct snapped height, where each group
    lists the union-find roots (point indices) joined at that height and the
    first entry is the surviving root. Only minimum spanning tree edges are
    scanned: below any threshold they have the same components as the full graph.
    """
    d = np.asarray(dist, dtype=float)
    n = d.shape[0]
    if n < 2:
        return
    grid = np.rint(d / EPS)
    # +1 keeps snapped-to-zero distances as edges; scipy treats 0 as "no edge"
    mst = minimum_spanning_tree(grid + 1.0).tocoo()
    order = np.lexsort((mst.col, mst.row, mst.data))
    rows, cols, weights = mst.row[order], mst.col[order], mst.data[order]
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    k = 0
    while k < len(weights):
        w = weights[k]
        stop = k
        while stop < len(weights) and weights[stop] == w:
            stop += 1
        height = float(d[rows[k], cols[k]])
        pairs = [(find(int(a)), find(int(b))) for a, b in zip(rows[k:stop], cols[k:stop])]
        touched = sorted({r for pair in pairs for r in pair})
        for a, b in pairs:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        groups = {}
        for r in touched:
            groups.setdefault(find(r), []).append(r)
        yield height, [g for g in groups.values() if len(g) > 1]
        k = stop


def to_dendrogram(space: FiniteMetricSpace) -> Dendrogram:
    require_ultrametric(space)
    labels = space.labels
    blocks = {i: [labels[i]] for i in range(len(labels))}
    parts = [frozenset(frozenset(b) for b in blocks.values())]
    heights = []
    for h, groups in merge_events(space.dist):
        for g in groups:
            keep = g[0]
            for r in g[1:]:
                blocks[keep].extend(blocks.pop(r))
        heights.append(h)
        parts.append(frozenset(frozenset(b) for b in blocks.values()))
    return Dendrogram(labels, tuple(heights), tuple(parts))


def from_dendrogram(dend: Dendrogram) -> FiniteMetricSpace:
    index = {lab: i for i, lab in enumerate(dend.leaves)}
    n = len(index)
    d = np.zeros((n, n))
    for h, fine, coarse in zip(dend.heights, dend.partitions, dend.partitions[1:]):
        where = {x: k for k, block in enumerate(coarse) for x in block}
        merged = {}
        for b in fine:
            merged.setdefault(where[next(iter(b))], []).append([index[x] for x in b])
        for parts in merged.values():
            # only pairs split across the merged sub-blocks get height h
            for k, a in enumerate(parts):
                for b in parts[k + 1:]:
                    d[np.ix_(a, b)] = h
                    d[np.ix_(b, a)] = h
    return FiniteMetricSpace(dend.leaves, d)


def dendrogram_dumps(dend: Dendrogram) -> str:
    return json.dumps(dend.to_dict())


# ------------------------------------------------------------ signatures

# Signatures are flat integer tuples: a truncated node is LEAF, an inner node is
# OPEN, height, <child signatures in sorted order>, CLOSE. The markers make the
# encoding prefix-free, so equal tuples mean isomorphic height-labelled trees.
LEAF = (-1,)
OPEN, CLOSE = -2, -3


class ClusterTree:
    """Rooted tree of clusters of an ultrametric space.

    A node of snapped height h has as children the classes of its members
    under u < h. Truncating at level t turns every node of height <= t into
    a leaf, which gives the tree of the t-closed quotient. Nodes are stored
    in creation order, so children always precede their parent.
    """

    def __init__(self, heights, children, members):
        self.heights = heights
        self.children = children
        self.members = members
        self.root = len(heights) - 1
        self._enc = {}

    @classmethod
    def of(cls, space: FiniteMetricSpace) -> "ClusterTree":
        n = len(space)
        heights = [0] * n
        children = [()] * n
        members = [[i] for i in range(n)]
        node_of = list(range(n))
        for h, groups in merge_events(space.dist):
            level = snap(h)
            for g in groups:
                heights.append(level)
                children.append(tuple(node_of[r] for r in g))
                members.append([m for r in g for m in members[node_of[r]]])
                node_of[g[0]] = len(heights) - 1
        return cls(heights, children, members)

    def _encode(self, cut):
        enc = self._enc.get(cut)
        if enc is None:
            enc = []
            for h, kids in zip(self.heights, self.children):
                if h <= cut:
                    enc.append(LEAF)
                else:
                    parts = sorted(enc[c] for c in kids)
                    enc.append((OPEN, h, *[x for part in parts for x in part], CLOSE))
            self._enc[cut] = enc
        return enc

    def signature(self, level: float = 0.0):
        return self._encode(snap(level))[self.root]

    def match(self, other: "ClusterTree", level: float = 0.0):
        """Pair up the leaf blocks of two equally-signed truncated trees.

        Returns a list of (members_self, members_other); None if signatures differ.
        """
        cut = snap(level)
        ex, ey = self._encode(cut), other._encode(cut)
        if ex[self.root] != ey[other.root]:
            return None
        out = []
        stack = [(self.root, other.root)]
        while stack:
            a, b = stack.pop()
            if self.heights[a] <= cut:
                out.append((list(self.members[a]), list(other.members[b])))
                continue
            mine = sorted(self.children[a], key=ex.__getitem__)
            theirs = sorted(other.children[b], key=ey.__getitem__)
            stack.extend(zip(mine, theirs))
        return out


@dataclass(frozen=True)
class CanonicalSignature:
    fingerprint: tuple


def canonical_signature(space: FiniteMetricSpace, level: float = 0.0) -> CanonicalSignature:
    """Relabelling-invariant fingerprint; equal iff the (level-quotiented) spaces are isometric."""
    require_ultrametric(space)
    return CanonicalSignature(ClusterTree.of(space).signature(level))


def isometric_ultrametrics(X, Y) -> bool:
    return canonical_signature(X) == canonical_signature(Y)
