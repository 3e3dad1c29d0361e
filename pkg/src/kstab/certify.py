"""Exact global minimum of the energy over ``{sum lam = 0, |lam|_oo <= 1}``.

``E`` is linear on every cell cut out by two families of homogeneous walls:

* weight ties ``w_j(lam) = w_l(lam)``, where the order of monomial weights
  (hence ``lam_max``) and the intercept order of every envelope can change;
* per variable ``k``, concurrency of three envelope lines
  ``(w_j - w_l)(a_j - a_m) = (w_j - w_m)(a_j - a_l)`` with ``a = alpha_k``,
  where the combinatorics of ``phi_k`` can change.

Adjoining the box facets ``lam_i = +-1`` makes every cell a bounded polytope,
so the minimum of ``E`` over the box is attained at a vertex of the
subdivision.  Vertices are found by brute force over all ``n``-subsets of the
constraints (the trace condition supplies the remaining equation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import CombinatorialBudgetExceeded
from .polynomial import Support
from .search import evaluate_many

__all__ = ["Constraint", "Certificate", "constraints", "subset_count", "certify_min", "DEFAULT_BOX_LIMIT"]

DEFAULT_BOX_LIMIT = 10**6


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    rhs: Fraction
    label: str

    def tight(self, lam: Sequence[Fraction]) -> bool:
        return sum((c * x for c, x in zip(self.coeffs, lam)), Fraction(0)) == self.rhs


@dataclass(frozen=True)
class Certificate:
    minimum: Fraction
    witness: tuple[Fraction, ...]
    walls_used: tuple[str, ...]  # constraints tight at the witness
    vertex_count: int
    constraint_count: int
    subset_count: int


def _canonical(coeffs: Sequence[int]) -> tuple[Fraction, ...] | None:
    """Project off the all-ones direction and scale to a primitive integer vector."""
    size = len(coeffs)
    mean = Fraction(sum(coeffs), size)
    proj = [Fraction(c) - mean for c in coeffs]
    if not any(proj):
        return None
    lcm = math.lcm(*(q.denominator for q in proj))
    ints = [int(q * lcm) for q in proj]
    g = math.gcd(*ints)
    ints = [x // g for x in ints]
    if next(x for x in ints if x) < 0:
        ints = [-x for x in ints]
    return tuple(Fraction(x) for x in ints)


def constraints(support: Support) -> list[Constraint]:
    """Deduplicated walls followed by the ``2(n+1)`` box facets."""
    rows = support.rows
    dim = support.n + 1
    seen: dict[tuple[Fraction, ...], str] = {}

    def add(coeffs, label):
        key = _canonical(coeffs)
        if key is not None and key not in seen:
            seen[key] = label

    for j, l in combinations(range(len(rows)), 2):
        add([a - b for a, b in zip(rows[j], rows[l])], f"w{j}=w{l}")
    for k in range(dim):
        for j, l, m in combinations(range(len(rows)), 3):
            a = rows[j][k] - rows[m][k]
            b = rows[j][k] - rows[l][k]
            coeffs = [(rows[j][i] - rows[l][i]) * a - (rows[j][i] - rows[m][i]) * b for i in range(dim)]
            add(coeffs, f"concurrent(k={k}; {j},{l},{m})")

    out = [Constraint(key, Fraction(0), label) for key, label in seen.items()]
    for i in range(dim):
        unit = tuple(Fraction(int(i == t)) for t in range(dim))
        out.append(Constraint(unit, Fraction(1), f"lambda{i}=+1"))
        out.append(Constraint(unit, Fraction(-1), f"lambda{i}=-1"))
    return out


def subset_count(support: Support) -> int:
    return math.comb(len(constraints(support)), support.n)


def _solve(matrix: list[list[Fraction]], rhs: list[Fraction]) -> tuple[Fraction, ...] | None:
    """Gauss-Jordan on a square system; None when singular."""
    size = len(matrix)
    a = [row[:] + [b] for row, b in zip(matrix, rhs)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if a[r][col] != 0), None)
        if pivot is None:
            return None
        a[col], a[pivot] = a[pivot], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(size):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(row[size] for row in a)


def _witness_key(lam: Sequence[Fraction]):
    # Among equal minima prefer the largest last coordinate, then the next-to-last, ...
    return tuple(-x for x in reversed(lam))


def certify_min(support: Support, box_limit: int = DEFAULT_BOX_LIMIT, jobs: int = 1) -> Certificate:
    """Enumerate every subdivision vertex and return the exact minimum of ``E``."""
    dim = support.n + 1
    cons = constraints(support)
    count = math.comb(len(cons), support.n)
    if count > box_limit:
        raise CombinatorialBudgetExceeded(count, box_limit)

    ones = [Fraction(1)] * dim
    vertices = set()
    for subset in combinations(cons, support.n):
        sol = _solve([ones] + [list(c.coeffs) for c in subset], [Fraction(0)] + [c.rhs for c in subset])
        if sol is not None and all(abs(x) <= 1 for x in sol):
            vertices.add(sol)

    ordered = sorted(vertices)
    # E itself, not the normalized score: the box contains its interior.
    values = [s * max(abs(x) for x in v) for s, v in zip(evaluate_many(support, ordered, jobs), ordered)]
    best_value, best = min(zip(values, ordered), key=lambda t: (t[0], _witness_key(t[1])))
    used = tuple(c.label for c in cons if c.tight(best))
    return Certificate(best_value, best, used, len(ordered), len(cons), count)
