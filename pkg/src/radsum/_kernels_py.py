"""Pure-Python/numpy fallback kernels.

Mirrors the compiled extension in ``_kernels.pyx``: exact distribution
enumeration by iterative merge, and chunked midpoint-panel sums for the
tail-bound integrands.  Selected by ``_backend`` when the compiled module
is unavailable.
"""

from __future__ import annotations

import math
from typing import Dict, List, Sequence, Tuple

import numpy as np

COMPILED = False

# integrand codes: 1x = |k|*g branch x, 2x = |k|*h branch x, 3 = k*gauss
CODE_KG1 = 11
CODE_KG2 = 12
CODE_KH1 = 21
CODE_KH2 = 22
CODE_KH3 = 23
CODE_KGAUSS = 3

_CHUNK = 1 << 20


def enum_dist_int64(weights: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    """Distribution of sum(w_i * x_i) over all sign vectors.

    Returns sorted distinct values and their counts (both int64).  The
    caller guarantees sum(|w_i|) fits comfortably in int64 and n <= 24.
    """
    vals = np.zeros(1, dtype=np.int64)
    cnts = np.ones(1, dtype=np.int64)
    for w in weights:
        lo = vals - w
        hi = vals + w
        merged = np.unique(np.concatenate([lo, hi]))
        out = np.zeros(merged.size, dtype=np.int64)
        np.add.at(out, np.searchsorted(merged, lo), cnts)
        np.add.at(out, np.searchsorted(merged, hi), cnts)
        vals, cnts = merged, out
    return vals, cnts


def enum_dist_big(weights: Sequence[int]) -> Tuple[List[int], List[int]]:
    """Arbitrary-precision fallback for huge scaled weights."""
    dist: Dict[int, int] = {0: 1}
    for w in weights:
        nxt: Dict[int, int] = {}
        get = nxt.get
        for v, c in dist.items():
            a, b = v - w, v + w
            nxt[a] = get(a, 0) + c
            nxt[b] = get(b, 0) + c
        dist = nxt
    items = sorted(dist.items())
    return [v for v, _ in items], [c for _, c in items]


def _kernel(u: np.ndarray, x: float, T: float) -> np.ndarray:
    # (1-u) sin(pi u - T u x)/sin(pi u) - sin(T u x)/pi, on 0 < u < 1;
    # sin(pi u) evaluated at min(u, 1-u) for accuracy near u = 1
    s = np.sin(np.pi * np.minimum(u, 1.0 - u))
    return (1.0 - u) * np.sin(np.pi * u - T * u * x) / s - np.sin(T * u * x) / np.pi


def _integrand(u: np.ndarray, code: int, a1: float, x: float, T: float) -> np.ndarray:
    k = _kernel(u, x, T)
    v = T * u
    if code == CODE_KGAUSS:
        return k * np.exp(-0.5 * v * v)
    ak = np.abs(k)
    if code == CODE_KG1:
        return ak * (np.exp(-0.5 * v * v) - np.cos(a1 * v) ** (1.0 / (a1 * a1)))
    if code == CODE_KG2:
        return ak * (np.exp(-0.5 * v * v) + 1.0)
    if code == CODE_KH1:
        return ak * np.exp(-0.5 * v * v)
    if code == CODE_KH2:
        return ak * (-np.cos(a1 * v)) ** (1.0 / (a1 * a1))
    if code == CODE_KH3:
        return ak
    raise ValueError(f"unknown integrand code {code}")


def panel_sums(
    a: float, b: float, n_panels: int, code: int, a1: float, x: float, T: float
) -> Tuple[float, float]:
    """Midpoint sums (sum f, sum |f|) over n_panels uniform panels."""
    delta = (b - a) / n_panels
    parts: List[float] = []
    parts_abs: List[float] = []
    for start in range(0, n_panels, _CHUNK):
        count = min(_CHUNK, n_panels - start)
        j = np.arange(start, start + count, dtype=np.float64)
        u = a + (j + 0.5) * delta
        f = _integrand(u, code, a1, x, T)
        parts.append(float(f.sum()))
        parts_abs.append(float(np.abs(f).sum()))
    return math.fsum(parts), math.fsum(parts_abs)
