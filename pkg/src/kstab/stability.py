"""Weight data, per-variable penalties and the energy functional.

For a support with exponent rows ``alpha^j`` and a weight vector ``lam`` with
zero trace, monomial ``j`` has weight ``w_j = sum_k lam_k alpha^j_k``.  With
``lam_max = max_j w_j`` the energy is

    E(lam) = -lam_max (d-1)(n+1)/n + sum_k int_0^oo phi_k'(phi_k' - 1) dx

where ``phi_k(x) = min_j (-w_j + alpha^j_k x)``, and the limit of ``t M'(t)``
is ``(2/d) E(lam)``.  ``E`` is evaluated directly from the envelopes for every
rational ``lam``, tied weights included.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .envelope import (
    Line,
    breakpoint_sequence,
    build_envelope,
    check_line_genericity,
    penalty_pair_sum,
    penalty_segment_sum,
)
from .errors import DimensionMismatch, DivergentPenalty, InternalConsistencyError, NonZeroTrace, NotInvariant
from .polynomial import Support, validate_support

__all__ = [
    "WeightData",
    "Genericity",
    "StabilityReport",
    "as_weights",
    "compute_weights",
    "phi_lines",
    "variable_penalty",
    "energy",
    "k_energy_limit",
    "check_genericity",
    "detect_invariance",
    "futaki_invariant",
    "report",
]

WeightVector = tuple[Fraction, ...]


def as_weights(lam: Sequence, n: int) -> WeightVector:
    vec = tuple(Fraction(x) for x in lam)
    if len(vec) != n + 1:
        raise DimensionMismatch(f"weight vector has {len(vec)} entries, expected n+1={n + 1}")
    if sum(vec) != 0:
        raise NonZeroTrace(f"weights must sum to 0, got {sum(vec)}")
    return vec


def _coefficient(support: Support) -> Fraction:
    return Fraction((support.d - 1) * (support.n + 1), support.n)


@dataclass(frozen=True)
class WeightData:
    w: tuple[Fraction, ...]
    lambda_max: Fraction
    delta: Fraction
    delta_i: tuple[Fraction, ...]
    order: tuple[int, ...]  # monomial indices by ascending delta_i, ties by index


def compute_weights(support: Support, lam: Sequence) -> WeightData:
    lam = as_weights(lam, support.n)
    w = tuple(sum((l * a for l, a in zip(lam, row)), Fraction(0)) for row in support.rows)
    top = max(w)
    delta_i = tuple(top - x for x in w)
    order = tuple(sorted(range(len(w)), key=lambda j: (delta_i[j], j)))
    return WeightData(w, top, -top, delta_i, order)


def _lines(support: Support, w: Sequence[Fraction], k: int) -> list[Line]:
    return [Line(-wj, row[k]) for wj, row in zip(w, support.rows)]


def phi_lines(support: Support, lam: Sequence, k: int) -> list[Line]:
    """The family whose lower envelope is ``phi_k``, deduplicated, in monomial order."""
    if not 0 <= k <= support.n:
        raise DimensionMismatch(f"variable index {k} outside 0..{support.n}")
    data = compute_weights(support, lam)
    seen = set()
    out = []
    for ln in _lines(support, data.w, k):
        if ln not in seen:
            seen.add(ln)
            out.append(ln)
    return out


def _penalty(lines: list[Line]) -> Fraction:
    try:
        by_segments = penalty_segment_sum(build_envelope(lines))
        by_pairs = penalty_pair_sum(breakpoint_sequence(lines), lines)
    except DivergentPenalty as exc:
        raise InternalConsistencyError(f"divergent penalty on a validated support: {exc}") from exc
    if by_segments != by_pairs:
        raise InternalConsistencyError(f"penalty routes disagree: {by_segments} != {by_pairs}")
    return by_segments


def variable_penalty(support: Support, lam: Sequence, k: int) -> Fraction:
    """Exact ``int_0^oo phi_k'(phi_k' - 1) dx``, checked by both closed forms."""
    return _penalty(phi_lines(support, lam, k))


def _penalties(support: Support, data: WeightData) -> tuple[Fraction, ...]:
    out = []
    for k in range(support.n + 1):
        lines = list(dict.fromkeys(_lines(support, data.w, k)))
        out.append(_penalty(lines))
    return tuple(out)


def energy(support: Support, lam: Sequence) -> Fraction:
    data = compute_weights(support, lam)
    return -data.lambda_max * _coefficient(support) + sum(_penalties(support, data), Fraction(0))


def k_energy_limit(support: Support, lam: Sequence) -> Fraction:
    return Fraction(2, support.d) * energy(support, lam)


@dataclass(frozen=True)
class Genericity:
    delta_ties: tuple[tuple[int, int], ...]
    concurrent: tuple[tuple[int, tuple[int, int, int]], ...]  # (variable, monomial triple)

    @property
    def generic(self) -> bool:
        return not self.delta_ties and not self.concurrent


def check_genericity(support: Support, lam: Sequence) -> Genericity:
    """Distinct ``delta_j``, and no three lines ``delta_j + alpha^j_k x`` concurrent for any ``k``."""
    data = compute_weights(support, lam)
    ties = []
    for i in range(len(data.delta_i)):
        for j in range(i + 1, len(data.delta_i)):
            if data.delta_i[i] == data.delta_i[j]:
                ties.append((i, j))
    concurrent = []
    for k in range(support.n + 1):
        lines = [Line(dj, row[k]) for dj, row in zip(data.delta_i, support.rows)]
        for triple in check_line_genericity(lines).concurrent_triples:
            concurrent.append((k, triple))
    return Genericity(tuple(ties), tuple(concurrent))


def detect_invariance(support: Support, lam: Sequence) -> Fraction | None:
    """``kappa`` with ``X F = kappa F`` when all monomial weights agree, else None."""
    w = compute_weights(support, lam).w
    return w[0] if all(x == w[0] for x in w) else None


def futaki_invariant(support: Support, lam: Sequence) -> Fraction:
    """``-(n+1)(d-1) kappa / n``; raises NotInvariant unless ``X F = kappa F``."""
    kappa = detect_invariance(support, lam)
    if kappa is None:
        raise NotInvariant(compute_weights(support, lam).w)
    value = -_coefficient(support) * kappa
    e = energy(support, lam)
    if e != value:
        raise InternalConsistencyError(f"invariant case: energy {e} differs from Futaki value {value}")
    return value


@dataclass(frozen=True)
class StabilityReport:
    weights: WeightVector
    weight_data: WeightData
    penalties: tuple[Fraction, ...]
    energy: Fraction
    limit: Fraction
    energy_reverse: Fraction
    limit_reverse: Fraction
    genericity: Genericity
    kappa: Fraction | None
    futaki: Fraction | None
    warnings: tuple[str, ...] = field(default=())

    @property
    def inequality_holds(self) -> bool:
        return self.energy >= 0


def report(support: Support, lam: Sequence) -> StabilityReport:
    """Everything known about one weight vector, including the reversed direction."""
    check = validate_support(support)
    lam = as_weights(lam, support.n)
    data = compute_weights(support, lam)
    penalties = _penalties(support, data)
    e = -data.lambda_max * _coefficient(support) + sum(penalties, Fraction(0))
    e_rev = energy(support, tuple(-x for x in lam))
    scale = Fraction(2, support.d)
    kappa = detect_invariance(support, lam)
    futaki = futaki_invariant(support, lam) if kappa is not None else None
    gen = check_genericity(support, lam)
    warnings = list(check.warnings)
    if not gen.generic:
        warnings.append("weights are not generic; the value is the continuous extension")
    return StabilityReport(
        weights=lam,
        weight_data=data,
        penalties=penalties,
        energy=e,
        limit=scale * e,
        energy_reverse=e_rev,
        limit_reverse=scale * e_rev,
        genericity=gen,
        kappa=kappa,
        futaki=futaki,
        warnings=tuple(warnings),
    )
