"""Floating-point quadrature of the envelope penalty, for tests only.

This is an oracle: it never looks at the exact envelope machinery, only at
pointwise values of ``min_i (b_i + s_i x)`` evaluated in floating point.
No user-facing number is ever produced by it.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .envelope import as_lines
from .errors import DivergentPenalty, EmptyFamily

_CHUNK = 1 << 18
_MAX_DEPTH = 48


def _kink_free(b: np.ndarray, s: np.ndarray, lo: float, hi: float) -> tuple[float, bool]:
    f = lambda x: float(np.min(b + s * x))  # noqa: E731
    flo, fhi, fmid = f(lo), f(hi), f(0.5 * (lo + hi))
    scale = max(1.0, abs(flo), abs(fhi))
    return (fhi - flo) / (hi - lo), abs(fmid - 0.5 * (flo + fhi)) <= 1e-13 * scale


def _cell(b: np.ndarray, s: np.ndarray, lo: float, hi: float, depth: int) -> float:
    q, flat = _kink_free(b, s, lo, hi)
    if flat or depth >= _MAX_DEPTH:
        return q * (q - 1.0) * (hi - lo)
    mid = 0.5 * (lo + hi)
    return _cell(b, s, lo, mid, depth + 1) + _cell(b, s, mid, hi, depth + 1)


def penalty_quadrature(lines: Sequence, grid_step: float = 1e-4) -> float:
    """Approximate ``int_0^oo psi'(psi' - 1) dx`` by difference quotients.

    The uniform grid of width ``grid_step`` covers ``[0, 2 R + 1]`` where ``R``
    is the largest pairwise crossing abscissa of the family; beyond it the
    envelope follows its tail line.  Cells whose midpoint value departs from
    the chord contain a kink and are bisected until the quotient is flat.
    """
    family = as_lines(lines)
    if not family:
        raise EmptyFamily("empty family")
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    tail = min(ln.slope for ln in family)
    if tail * (tail - 1) != 0:
        raise DivergentPenalty(tail)

    b = np.array([float(ln.intercept) for ln in family])
    s = np.array([float(ln.slope) for ln in family])

    # Brute-force bound on the last kink: largest crossing over all pairs.
    last = 0.0
    for i in range(len(b)):
        for j in range(i + 1, len(b)):
            if s[i] != s[j]:
                last = max(last, (b[j] - b[i]) / (s[i] - s[j]))
    upper = 2.0 * last + 1.0
    cells = int(np.ceil(upper / grid_step))

    total = 0.0
    for c0 in range(0, cells, _CHUNK):
        c1 = min(cells, c0 + _CHUNK)
        xs = np.arange(c0, c1 + 1, dtype=float) * grid_step
        mids = xs[:-1] + 0.5 * grid_step
        psi = np.min(b[:, None] + s[:, None] * xs[None, :], axis=0)
        psi_mid = np.min(b[:, None] + s[:, None] * mids[None, :], axis=0)
        q = np.diff(psi) / grid_step
        scale = np.maximum(1.0, np.maximum(np.abs(psi[:-1]), np.abs(psi[1:])))
        kinked = np.abs(psi_mid - 0.5 * (psi[:-1] + psi[1:])) > 1e-13 * scale
        smooth = ~kinked
        total += float(np.sum(q[smooth] * (q[smooth] - 1.0)) * grid_step)
        for k in np.nonzero(kinked)[0]:
            total += _cell(b, s, xs[k], xs[k + 1], 0)
    return total
