"""Exact lower envelopes of rational lines on the half-line [0, oo).

A family of lines ``intercept + slope * x`` is reduced to the concave
piecewise-linear function ``psi(x) = min_i (intercept_i + slope_i * x)``.
Two independent constructions are provided:

* :func:`build_envelope` goes through point/line duality: the lines that
  appear on ``[0, oo)`` are the vertices of a lower convex hull of the dual
  points ``(slope, intercept)``.
* :func:`breakpoint_sequence` walks the family from ``x = 0`` jumping to the
  first line that crosses below the current one.

Both penalty closed forms for ``int_0^oo psi'(psi' - 1) dx`` live here as well.
Everything is exact; :class:`fractions.Fraction` is the rational type.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .errors import DivergentPenalty, EmptyFamily

__all__ = [
    "Line",
    "Segment",
    "Envelope",
    "BreakpointSequence",
    "LineGenericity",
    "as_lines",
    "build_envelope",
    "breakpoint_sequence",
    "penalty_segment_sum",
    "penalty_pair_sum",
    "check_line_genericity",
]


@dataclass(frozen=True, order=True)
class Line:
    intercept: Fraction
    slope: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "intercept", Fraction(self.intercept))
        object.__setattr__(self, "slope", Fraction(self.slope))

    def __call__(self, x: Fraction) -> Fraction:
        return self.intercept + self.slope * x


def as_lines(pairs: Iterable) -> list[Line]:
    """Coerce ``(intercept, slope)`` pairs (or Lines) to a list of Lines."""
    out = []
    for item in pairs:
        if isinstance(item, Line):
            out.append(item)
        else:
            b, s = item
            out.append(Line(b, s))
    return out


@dataclass(frozen=True)
class Segment:
    start: Fraction
    end: Fraction | None  # None is the unbounded tail
    slope: Fraction
    value_at_start: Fraction
    line: Line

    @property
    def length(self) -> Fraction | None:
        return None if self.end is None else self.end - self.start

    @property
    def contribution(self) -> Fraction:
        """Exact ``int psi'(psi'-1)`` over this segment; 0 on a convergent tail."""
        weight = self.slope * (self.slope - 1)
        if self.end is None:
            if weight != 0:
                raise DivergentPenalty(self.slope)
            return Fraction(0)
        return (self.end - self.start) * weight


@dataclass(frozen=True)
class Envelope:
    segments: tuple[Segment, ...]

    @property
    def final_slope(self) -> Fraction:
        return self.segments[-1].slope

    @property
    def breakpoints(self) -> list[Fraction]:
        return [seg.start for seg in self.segments[1:]]

    @property
    def slopes(self) -> list[Fraction]:
        return [seg.slope for seg in self.segments]

    def value(self, x) -> Fraction:
        x = Fraction(x)
        if x < 0:
            raise ValueError("envelope is defined on [0, oo) only")
        for seg in self.segments:
            if seg.end is None or x <= seg.end:
                return seg.value_at_start + seg.slope * (x - seg.start)
        raise AssertionError("unreachable: last segment is unbounded")

    def __call__(self, x) -> Fraction:
        return self.value(x)


@dataclass(frozen=True)
class BreakpointSequence:
    """Pairs ``(line_index, breakpoint)`` starting at ``(i0, 0)``."""

    entries: tuple[tuple[int, Fraction], ...]

    @property
    def indices(self) -> list[int]:
        return [i for i, _ in self.entries]

    @property
    def breakpoints(self) -> list[Fraction]:
        return [r for _, r in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def build_envelope(lines: Sequence) -> Envelope:
    """Lower envelope of ``lines`` restricted to ``[0, oo)``.

    Dual points ``(slope, intercept)`` are hulled with a monotone chain; the
    envelope on ``[0, oo)`` runs backwards along the lower hull from the
    minimal-intercept vertex to the minimal-slope vertex.  Collinear dual
    points (three concurrent lines) are dropped, so no zero-length segment
    survives.
    """
    family = as_lines(lines)
    if not family:
        raise EmptyFamily("cannot build the envelope of an empty family")

    # Among parallel lines only the lowest can ever be active.
    lowest: dict[Fraction, Fraction] = {}
    for ln in family:
        b = lowest.get(ln.slope)
        if b is None or ln.intercept < b:
            lowest[ln.slope] = ln.intercept
    points = sorted(lowest.items())

    hull: list[tuple[Fraction, Fraction]] = []
    for p in points:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)

    min_b = min(b for _, b in hull)
    start = next(i for i, (_, b) in enumerate(hull) if b == min_b)

    segments = []
    x0 = Fraction(0)
    for i in range(start, -1, -1):
        s, b = hull[i]
        if i > 0:
            s_next, b_next = hull[i - 1]
            end = (b_next - b) / (s - s_next)
        else:
            end = None
        segments.append(Segment(x0, end, s, b + s * x0, Line(b, s)))
        x0 = end
    return Envelope(tuple(segments))


def breakpoint_sequence(lines: Sequence) -> BreakpointSequence:
    """Inductive ``(i_k, r_k)`` construction over the original line indices.

    Starts on the line lowest at ``0+`` (smallest intercept, then smallest
    slope, then smallest index).  From line ``i_k`` at ``r_k`` it moves to the
    line of smaller slope that crosses first; a tie at that crossing goes to
    the smallest slope, which collapses concurrent lines.
    """
    family = as_lines(lines)
    if not family:
        raise EmptyFamily("cannot build the breakpoint sequence of an empty family")

    current = min(range(len(family)), key=lambda j: (family[j].intercept, family[j].slope, j))
    r = Fraction(0)
    entries = [(current, r)]
    while True:
        cur = family[current]
        best = None
        for j, ln in enumerate(family):
            if ln.slope < cur.slope:
                x = (ln.intercept - cur.intercept) / (cur.slope - ln.slope)
                key = (x, ln.slope, j)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        x, _, current = best
        if x <= r:
            raise AssertionError(f"breakpoints must increase: {x} after {r}")
        r = x
        entries.append((current, r))
    return BreakpointSequence(tuple(entries))


def penalty_segment_sum(env: Envelope) -> Fraction:
    """Sum of ``length * slope * (slope - 1)`` over the bounded segments."""
    tail = env.final_slope
    if tail * (tail - 1) != 0:
        raise DivergentPenalty(tail)
    return sum((seg.contribution for seg in env.segments), Fraction(0))


def penalty_pair_sum(seq: BreakpointSequence, lines: Sequence) -> Fraction:
    """Breakpoint-pair closed form of the penalty.

    ``sum_k (b[i_{k+1}] - b[i_k]) * (s[i_k] + s[i_{k+1}] - 1)`` over
    consecutive entries, with ``b`` the intercepts and ``s`` the slopes.
    Valid when the last slope is 0 or 1.
    """
    family = as_lines(lines)
    idx = seq.indices
    last = family[idx[-1]].slope
    if last * (last - 1) != 0:
        raise DivergentPenalty(last)
    total = Fraction(0)
    for a, b in zip(idx, idx[1:]):
        la, lb = family[a], family[b]
        total += (lb.intercept - la.intercept) * (la.slope + lb.slope - 1)
    return total


@dataclass(frozen=True)
class LineGenericity:
    intercept_ties: tuple[tuple[int, int], ...]
    concurrent_triples: tuple[tuple[int, int, int], ...]

    @property
    def distinct_intercepts(self) -> bool:
        return not self.intercept_ties

    @property
    def generic(self) -> bool:
        return not self.intercept_ties and not self.concurrent_triples


def _concurrent(a: Line, b: Line, c: Line) -> bool:
    trio = (a, b, c)
    for p, q in combinations(trio, 2):
        if p.slope != q.slope:
            x = (q.intercept - p.intercept) / (p.slope - q.slope)
            v = p(x)
            return all(ln(x) == v for ln in trio)
    # all parallel: a common point exists only if they coincide
    return a.intercept == b.intercept == c.intercept


def check_line_genericity(lines: Sequence) -> LineGenericity:
    """Report intercept ties and triples of lines through a common point.

    Concurrency is checked on the whole real line, not only on ``[0, oo)``.
    """
    family = as_lines(lines)
    ties = tuple(
        (i, j)
        for i, j in combinations(range(len(family)), 2)
        if family[i].intercept == family[j].intercept
    )
    triples = tuple(
        t for t in combinations(range(len(family)), 3) if _concurrent(*(family[i] for i in t))
    )
    return LineGenericity(ties, triples)
