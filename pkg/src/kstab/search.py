"""Search the trace-zero weight hyperplane for negative energy.

Scores are scale free: ``score(lam) = E(lam) / |lam|_oo``, which is legitimate
because ``E`` is positively homogeneous.  Candidates come from exhaustive
integer enumeration and seeded random sampling; the best few are polished by
an exact pattern search along the moves ``lam +- s (e_i - e_j)``.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .polynomial import Support
from .rational import sup_norm
from .stability import energy

__all__ = [
    "SearchConfig",
    "SearchResult",
    "enumerate_integer_directions",
    "sample_directions",
    "normalize",
    "score",
    "local_refine",
    "search_min",
    "evaluate_many",
]

WeightVector = tuple[Fraction, ...]

# Sampled integer coordinates are drawn from [-_SAMPLE_RANGE, _SAMPLE_RANGE].
_SAMPLE_RANGE = 1000


@dataclass(frozen=True)
class SearchConfig:
    height: int = 1
    samples: int = 0
    seed: int = 0
    refine_rounds: int = 16
    denominator_cap: int = 64
    refine_top: int = 3
    jobs: int = 1

    def __post_init__(self) -> None:
        for name in ("height", "samples", "refine_rounds", "refine_top"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.denominator_cap < 1:
            raise ValueError("denominator_cap must be at least 1")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")


@dataclass(frozen=True)
class SearchResult:
    best_lambda: WeightVector
    best_score: Fraction
    evaluations: int
    trace: tuple[tuple[WeightVector, Fraction], ...] = field(default=())

    @property
    def violated(self) -> bool:
        return self.best_score < 0


def enumerate_integer_directions(n: int, height: int) -> Iterator[WeightVector]:
    """Primitive integer ``lam`` with zero trace and ``|lam|_oo <= height``, lexicographically."""
    if height < 0:
        raise ValueError("height must be nonnegative")
    if height == 0:
        return
    for head in itertools.product(range(-height, height + 1), repeat=n):
        last = -sum(head)
        if abs(last) > height:
            continue
        vec = head + (last,)
        if math.gcd(*vec) != 1:  # also drops the zero vector
            continue
        yield tuple(Fraction(x) for x in vec)


def normalize(lam: Sequence) -> WeightVector:
    m = sup_norm(lam)
    if m == 0:
        return tuple(Fraction(x) for x in lam)
    return tuple(Fraction(x) / m for x in lam)


def sample_directions(n: int, count: int, seed: int) -> list[WeightVector]:
    """Seeded rational directions on the hyperplane with ``|lam|_oo = 1``.

    Sample ``i`` uses its own stream keyed on ``(seed, i)``, so the list does
    not depend on how the work is later split across processes.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    root = np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF)
    out = []
    for i in range(count):
        rng = np.random.default_rng(np.random.SeedSequence(root.entropy, spawn_key=(i,)))
        while True:
            v = [int(x) for x in rng.integers(-_SAMPLE_RANGE, _SAMPLE_RANGE + 1, size=n + 1)]
            total = sum(v)
            centred = [(n + 1) * x - total for x in v]
            if any(centred):
                break
        out.append(normalize(centred))
    return out


def score(support: Support, lam: Sequence) -> Fraction:
    m = sup_norm(lam)
    if m == 0:
        return Fraction(0)
    return energy(support, lam) / m


def _score_task(args) -> Fraction:
    support, lam = args
    return score(support, lam)


def evaluate_many(support: Support, lambdas: Sequence[Sequence], jobs: int = 1) -> list[Fraction]:
    """Scores in input order; the pool only changes wall time, never results."""
    if jobs <= 1 or len(lambdas) < 2 * jobs:
        return [score(support, lam) for lam in lambdas]
    chunk = max(1, len(lambdas) // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_score_task, ((support, lam) for lam in lambdas), chunksize=chunk))


def _key(lam: Sequence) -> WeightVector:
    return normalize(lam)


def _refine(support: Support, start: WeightVector, start_score: Fraction, cfg: SearchConfig):
    """Pattern search; returns ``(lam, score, evaluations, trace)``."""
    dim = len(start)
    current, current_score = start, start_score
    trace = [(start, start_score)]
    evaluations = 0
    step = Fraction(1)
    floor = Fraction(1, cfg.denominator_cap)
    moves = [(i, j) for i in range(dim) for j in range(dim) if i != j]
    base = normalize(start)
    for _ in range(cfg.refine_rounds):
        if step < floor:
            break
        cands = []
        for i, j in moves:
            cand = list(base)
            cand[i] += step
            cand[j] -= step
            if any(cand):
                cands.append(normalize(cand))
        scores = evaluate_many(support, cands, cfg.jobs)
        evaluations += len(cands)
        best = min(zip(scores, cands), default=None)
        if best is not None and best[0] < current_score:
            current_score, current = best
            base = current
            trace.append((current, current_score))
        else:
            step /= 2
    return current, current_score, evaluations, trace


def local_refine(support: Support, start: Sequence, cfg: SearchConfig) -> WeightVector:
    """Exact pattern search from ``start``; never returns a worse score.

    When no move improves, ``start`` itself is returned unchanged.
    """
    start = tuple(Fraction(x) for x in start)
    if not any(start):
        raise ValueError("cannot refine from the zero vector")
    lam, _, _, _ = _refine(support, start, score(support, start), cfg)
    return lam


def search_min(support: Support, cfg: SearchConfig = SearchConfig()) -> SearchResult:
    """Best normalized score over enumeration, sampling and refinement.

    Ties go to the lexicographically smallest normalized ``lam``.
    """
    n = support.n
    cands = list(enumerate_integer_directions(n, cfg.height))
    cands += sample_directions(n, cfg.samples, cfg.seed)
    scores = evaluate_many(support, cands, cfg.jobs)
    evaluations = len(cands)

    pool: dict[WeightVector, tuple[Fraction, WeightVector, list]] = {}
    for s, lam in zip(scores, cands):
        k = _key(lam)
        if k not in pool or (s, k) < (pool[k][0], k):
            pool[k] = (s, lam, [(lam, s)])
    if not pool:
        zero = tuple(Fraction(0) for _ in range(n + 1))
        return SearchResult(zero, Fraction(0), 0, ())

    ranked = sorted(pool.items(), key=lambda kv: (kv[1][0], kv[0]))
    if cfg.refine_rounds > 0:
        for k, (s, lam, _) in ranked[: cfg.refine_top]:
            got, got_score, evals, trace = _refine(support, lam, s, cfg)
            evaluations += evals
            gk = _key(got)
            if gk not in pool or got_score < pool[gk][0]:
                pool[gk] = (got_score, got, trace)

    best_key = min(pool, key=lambda k: (pool[k][0], k))
    best_score, best_lambda, trace = pool[best_key]
    return SearchResult(best_lambda, best_score, evaluations, tuple(trace))
