"""Deterministic quadrature and scalar search primitives.

All routines are pure and use fixed node sets so that repeated runs are
bitwise identical.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@lru_cache(maxsize=32)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def gauss_legendre(lo: float, hi: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [lo, hi]."""
    x, w = _leggauss(n)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def piecewise_gauss(
    f: Callable[[np.ndarray], np.ndarray],
    edges: Sequence[float],
    n: int,
) -> float:
    """Integrate f over consecutive [edges[i], edges[i+1]] segments with
    n-node Gauss-Legendre per segment.  Edges must be sorted; zero-width
    segments contribute nothing.  Reduction order is fixed (left to right).
    """
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        x, w = gauss_legendre(lo, hi, n)
        total += float(np.dot(w, np.asarray(f(x), dtype=float)))
    return total


def split_edges(lo: float, hi: float, points: Sequence[float]) -> list[float]:
    """Sorted segment edges for [lo, hi] with forced splits at interior points."""
    inner = sorted({float(p) for p in points if lo < p < hi})
    return [lo, *inner, hi]


def adaptive_simpson(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    max_depth: int = 13,
) -> float:
    """Composite Simpson with uniform interval doubling until the estimate is
    stable to tol (absolute, with a relative guard for large values).

    f must accept a 1-d numpy array.
    """
    if hi <= lo:
        return 0.0
    prev = None
    n = 4
    for _ in range(max_depth):
        x = np.linspace(lo, hi, n + 1)
        y = np.asarray(f(x), dtype=float)
        h = (hi - lo) / n
        s = h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())
        if prev is not None and abs(s - prev) <= tol * max(1.0, abs(s)):
            return s
        prev = s
        n *= 2
    return prev


def adaptive_simpson_batched(
    f: Callable[[np.ndarray], np.ndarray],
    lo: np.ndarray,
    hi: np.ndarray,
    tol: float = 1e-10,
    max_depth: int = 12,
) -> np.ndarray:
    """Batch of Simpson integrals with shared uniform refinement.

    lo and hi have shape (m,); f maps an (m, p) array of abscissae to an
    (m, p) array of integrand values.  Refinement stops when every row is
    stable to tol.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    width = hi - lo
    live = width > 0.0
    if not live.any():
        return np.zeros_like(width)
    prev = None
    n = 4
    for _ in range(max_depth):
        u = np.linspace(0.0, 1.0, n + 1)
        x = lo[:, None] + width[:, None] * u[None, :]
        y = np.asarray(f(x), dtype=float)
        h = width / n
        s = h / 3.0 * (
            y[:, 0] + y[:, -1] + 4.0 * y[:, 1:-1:2].sum(axis=1) + 2.0 * y[:, 2:-1:2].sum(axis=1)
        )
        s = np.where(live, s, 0.0)
        if prev is not None:
            err = np.abs(s - prev)
            if np.all(err <= tol * np.maximum(1.0, np.abs(s))):
                return s
        prev = s
        n *= 2
    return prev


def adaptive_gauss_batched(
    f: Callable[[np.ndarray], np.ndarray],
    lo: np.ndarray,
    hi: np.ndarray,
    tol: float = 1e-10,
    sizes: Sequence[int] = (32, 64, 128, 256, 512),
) -> np.ndarray:
    """Batch of Gauss-Legendre integrals with increasing node counts.

    lo and hi have shape (m,); f maps an (m, p) array of abscissae to an
    (m, p) array of integrand values.  All nodes are interior, so integrands
    may jump at the segment endpoints without spoiling convergence.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    width = hi - lo
    live = width > 0.0
    if not live.any():
        return np.zeros_like(width)
    prev = None
    for n in sizes:
        u, w = _leggauss(n)
        x = lo[:, None] + width[:, None] * 0.5 * (u[None, :] + 1.0)
        y = np.asarray(f(x), dtype=float)
        s = 0.5 * width * (y @ w)
        s = np.where(live, s, 0.0)
        if prev is not None and np.all(np.abs(s - prev) <= tol * np.maximum(1.0, np.abs(s))):
            return s
        prev = s
    return prev


def golden_section_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    rel_tol: float = 1e-6,
) -> tuple[float, float]:
    """Golden-section search for a maximum of a unimodal f on [lo, hi].

    Returns (argmax, value) taken from the best point actually evaluated,
    so exact endpoint optima survive.  The bracket is shrunk until its width
    is below 0.1 * rel_tol * max(1, |x|).
    """
    a, b = float(lo), float(hi)
    best_x, best_v = a, f(a)
    for x in (b,):
        v = f(x)
        if v > best_v:
            best_x, best_v = x, v
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(400):
        if fc > best_v:
            best_x, best_v = c, fc
        if fd > best_v:
            best_x, best_v = d, fd
        if (b - a) <= 0.1 * rel_tol * max(1.0, abs(0.5 * (a + b))):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return best_x, best_v


def bisect_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    iters: int = 200,
) -> float | None:
    """Root of a continuous f on [lo, hi] by bisection; None if no sign change."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        return None
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
        if hi - lo <= 1e-14 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)
