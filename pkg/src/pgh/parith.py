"""Arithmetic of p-sums and p-differences on the non-negative reals.

Exponents are plain floats in ``[1, inf]``; ``math.inf`` is the ultrametric
case. All operations accept scalars or numpy arrays and broadcast; scalar
inputs give a Python float back.
"""

import math
import re
from functools import reduce

import numpy as np

INF = math.inf

_P_PATTERN = re.compile(r"^([1-9][0-9]*(\.[0-9]+)?|1\.0+|inf)$")


def parse_p(text) -> float:
    """Parse an exponent given as text ("2", "1.5", "inf") or a number."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return check_p(float(text))
    text = str(text).strip()
    if not _P_PATTERN.match(text):
        raise ValueError(f"invalid exponent {text!r}: expected a decimal >= 1 or 'inf'")
    return check_p(INF if text == "inf" else float(text))


def check_p(p: float) -> float:
    if math.isnan(p) or p < 1:
        raise ValueError(f"exponent must lie in [1, inf], got {p}")
    return float(p)


def format_p(p: float) -> str:
    return "inf" if p == INF else f"{p:g}"


def inv(p: float) -> float:
    """1/p with the convention 1/inf = 0."""
    return 0.0 if p == INF else 1.0 / p


def coefficient(p: float) -> float:
    """The normalising factor 2^(-1/p) in front of p-distortions."""
    return 2.0 ** (-inv(p))


def _out(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def _scaled_root(a, b, p, combine):
    # (combine(a^p, b^p))^(1/p), evaluated on (a/m, b/m) with m = max(a, b)
    # so that neither overflow nor underflow can occur for large p
    m = np.maximum(a, b)
    safe = np.where(m > 0, m, 1.0)
    inner = combine((a / safe) ** p, (b / safe) ** p)
    return np.where(m > 0, safe * inner ** (1.0 / p), 0.0)


def p_sum(a, b, p: float):
    """a ⊞_p b: (a^p + b^p)^(1/p), or max(a, b) when p is infinite."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if p == INF:
        return _out(np.maximum(a, b))
    if p == 1:
        return _out(a + b)
    return _out(_scaled_root(a, b, p, np.add))


def p_sum_many(values, p: float) -> float:
    """Left fold of `p_sum` over a non-empty sequence."""
    values = list(values)
    if not values:
        raise ValueError("p_sum_many of an empty sequence is undefined")
    return float(reduce(lambda acc, v: p_sum(acc, v, p), values[1:], float(values[0])))


def lambda_p(a, b, p: float):
    """Absolute p-difference |a^p - b^p|^(1/p).

    At p = inf this is max(a, b) for a != b and 0 for a == b. The equality
    test is exact on purpose; callers wanting tolerance must round first.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if p == INF:
        return _out(np.where(a == b, 0.0, np.maximum(a, b)))
    if p == 1:
        return _out(np.abs(a - b))
    return _out(_scaled_root(a, b, p, lambda x, y: np.abs(x - y)))


def a_p(a, b, p: float):
    """Asymmetric p-difference: lambda_p(a, b) if a > b, else 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return _out(np.where(a > b, lambda_p(a, b, p), 0.0))
