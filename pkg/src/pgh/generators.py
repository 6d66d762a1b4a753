"""Seeded random metric, p-metric and ultrametric spaces.

Randomness comes from SplitMix64 so fixtures can be regenerated bit for bit
from a seed in any language:

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)                      (all arithmetic mod 2**64)

A uniform double in [0, 1) is ``(next() >> 11) * 2**-53``.
"""

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from ._config import EPS, snap
from .parith import INF, parse_p
from .projections import path_closure, snowflake
from .spaces import FiniteMetricSpace

_MASK = (1 << 64) - 1
MAX_POINTS = 4096


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def random(self) -> float:
        return (self.next() >> 11) * 2.0**-53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def below(self, k: int) -> int:
        """Integer in [0, k) by scaling a uniform double."""
        return min(int(self.random() * k), k - 1)


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    n_points: int = 4
    lo: float = 1.0
    hi: float = 10.0
    kind: str = "metric"  # "metric" | "p_metric" | "ultrametric"
    p: float = 2.0  # used by kind="p_metric"
    # ultrametric only: draw merge heights from this many evenly spaced values,
    # so different spaces share heights and merges can tie
    levels: int = None

    def __post_init__(self):
        if self.kind not in ("metric", "p_metric", "ultrametric"):
            raise ValueError(f"unknown space class {self.kind!r}")
        if not (self.lo > 0 and self.hi >= self.lo and math.isfinite(self.hi)):
            raise ValueError("value range needs 0 < lo <= hi < inf")
        if not 1 <= self.n_points <= MAX_POINTS:
            raise ValueError(f"n_points must lie in [1, {MAX_POINTS}]")
        if self.levels is not None and self.levels < 1:
            raise ValueError("levels must be >= 1")
        if self.kind == "p_metric" and not self.p >= 1:
            raise ValueError("p must be >= 1")

    @classmethod
    def from_json(cls, text: str) -> "GenConfig":
        data = json.loads(text)
        if "class" in data:
            data["kind"] = data.pop("class")
        if "value_range" in data:
            data["lo"], data["hi"] = data.pop("value_range")
        if "p" in data:
            data["p"] = parse_p(data["p"])
        return cls(**data)

    def to_json(self) -> str:
        data = asdict(self)
        data["p"] = "inf" if data["p"] == INF else data["p"]
        return json.dumps(data)


def _labels(n):
    return [f"x{i}" for i in range(n)]


def random_metric(rng: SplitMix64, n: int, lo: float, hi: float) -> FiniteMetricSpace:
    """Random symmetric weights in [lo, hi], closed under shortest paths."""
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d[i, j] = d[j, i] = rng.uniform(lo, hi)
    return FiniteMetricSpace(_labels(n), path_closure(d, 1.0))


def random_ultrametric(rng: SplitMix64, n: int, lo: float, hi: float, levels=None) -> FiniteMetricSpace:
    """Agglomerate n singletons, merging two random clusters at each of n-1 sorted heights."""
    if levels is None:
        heights = sorted(rng.uniform(lo, hi) for _ in range(n - 1))
        for k in range(1, len(heights)):
            # keep merges distinct on the EPS grid, not just as floats
            if snap(heights[k]) <= snap(heights[k - 1]):
                heights[k] = heights[k - 1] + 2 * EPS
    else:
        grid = [lo] if levels == 1 else [lo + (hi - lo) * i / (levels - 1) for i in range(levels)]
        heights = sorted(grid[rng.below(levels)] for _ in range(n - 1))
    clusters = [[i] for i in range(n)]
    d = np.zeros((n, n))
    for h in heights:
        a = rng.below(len(clusters))
        b = rng.below(len(clusters) - 1)
        if b >= a:
            b += 1
        ca, cb = clusters[a], clusters[b]
        d[np.ix_(ca, cb)] = h
        d[np.ix_(cb, ca)] = h
        clusters = [c for k, c in enumerate(clusters) if k not in (a, b)] + [ca + cb]
    return FiniteMetricSpace(_labels(n), d)


def generate(cfg: GenConfig) -> FiniteMetricSpace:
    rng = SplitMix64(cfg.seed)
    n = cfg.n_points
    if cfg.kind == "ultrametric":
        return random_ultrametric(rng, n, cfg.lo, cfg.hi, cfg.levels)
    base = random_metric(rng, n, cfg.lo, cfg.hi)
    if cfg.kind == "p_metric":
        if cfg.p == INF:
            return random_ultrametric(rng, n, cfg.lo, cfg.hi, cfg.levels)
        return snowflake(base, 1.0 / cfg.p)
    return base


def sample(seed: int, kind: str, n: int, **kw) -> FiniteMetricSpace:
    """Shorthand for ``generate(GenConfig(seed=..., kind=..., n_points=...))``."""
    return generate(GenConfig(seed=seed, n_points=n, kind=kind, **kw))
