from fractions import Fraction as F
import random

import pytest

from kstab.certify import certify_min, constraints, subset_count
from kstab.errors import CombinatorialBudgetExceeded
from kstab.polynomial import build_support, parse_polynomial
from kstab.rational import sup_norm
from kstab.search import (
    SearchConfig,
    enumerate_integer_directions,
    local_refine,
    sample_directions,
    score,
    search_min,
)
from kstab.stability import energy

from oracles import brute_directions, brute_energy, random_support_rows

FERMAT = parse_polynomial("Z0^3 + Z1^3 + Z2^3 + Z3^3")
CONIC = parse_polynomial("Z0*Z1 + Z2^2")
QUADRIC = parse_polynomial("Z0*Z3 - Z1*Z2")


def ints(vec):
    return tuple(int(x) for x in vec)


# --- enumeration and sampling ----------------------------------------------------


def test_enumeration_examples():
    assert [ints(v) for v in enumerate_integer_directions(1, 1)] == [(-1, 1), (1, -1)]
    got = [ints(v) for v in enumerate_integer_directions(2, 1)]
    assert len(got) == 6 and sorted(got) == brute_directions(2, 1)
    assert list(enumerate_integer_directions(4, 0)) == []


@pytest.mark.parametrize("n, h", [(1, 4), (2, 3), (3, 2), (4, 1)])
def test_enumeration_matches_brute_force(n, h):
    got = [ints(v) for v in enumerate_integer_directions(n, h)]
    assert got == brute_directions(n, h)  # already lexicographic


def test_sampling_contract():
    assert sample_directions(3, 0, 7) == []
    a = sample_directions(3, 25, 1234)
    assert a == sample_directions(3, 25, 1234)
    assert a != sample_directions(3, 25, 1235)
    for v in a:
        assert sum(v) == 0 and sup_norm(v) == 1
    # prefix stability: sample i does not depend on how many are drawn
    assert sample_directions(3, 10, 1234) == a[:10]


# --- refinement ----------------------------------------------------------------------


def test_refine_fixed_point():
    start = (F(0), F(1), F(-1))  # global minimizer of the conic
    assert local_refine(CONIC, start, SearchConfig(refine_rounds=6)) == start


def test_refine_monotone_on_fermat():
    start = (1, 0, -1, 0)
    got = local_refine(FERMAT, start, SearchConfig(refine_rounds=10))
    assert score(FERMAT, got) <= score(FERMAT, start)


def test_refine_conic_reaches_minimum_in_two_rounds():
    got = local_refine(CONIC, (1, -1, 0), SearchConfig(refine_rounds=2))
    assert score(CONIC, (1, -1, 0)) == 0
    assert score(CONIC, got) == F(-3, 2)


@pytest.mark.parametrize("seed", range(8))
def test_refine_never_worsens(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    s = build_support(n, random_support_rows(rng, n, rng.randint(2, 3), rng.randint(2, 5)))
    for start in sample_directions(n, 3, seed):
        got = local_refine(s, start, SearchConfig(refine_rounds=6, denominator_cap=8))
        assert score(s, got) <= score(s, start)


# --- search_min --------------------------------------------------------------------------


def test_search_fermat_height_one():
    res = search_min(FERMAT, SearchConfig(height=1, samples=0))
    assert res.best_score == -8 and ints(res.best_lambda) == (-1, -1, 1, 1)
    assert res.violated


def test_search_conic_height_one():
    res = search_min(CONIC, SearchConfig(height=1))
    assert res.best_score == F(-3, 2) and ints(res.best_lambda) == (0, 1, -1)


def test_search_empty():
    res = search_min(QUADRIC, SearchConfig(height=0, samples=0))
    assert res.best_score == 0 and set(res.best_lambda) == {0}
    assert not res.violated and res.evaluations == 0


def test_search_result_is_rederivable():
    res = search_min(CONIC, SearchConfig(height=2, samples=5, seed=3))
    assert res.best_score == energy(CONIC, res.best_lambda) / sup_norm(res.best_lambda)


def test_evaluation_budget_without_refinement():
    cfg = SearchConfig(height=2, samples=7, seed=1, refine_rounds=0)
    res = search_min(FERMAT, cfg)
    assert res.evaluations == len(list(enumerate_integer_directions(3, 2))) + 7


def test_evaluation_budget_with_refinement():
    cfg = SearchConfig(height=1, samples=2, seed=5, refine_rounds=3, refine_top=2)
    res = search_min(CONIC, cfg)
    # each round tries every ordered pair move (3*2) that is nonzero
    base = len(list(enumerate_integer_directions(2, 1))) + 2
    assert base < res.evaluations <= base + 2 * 3 * 6


def test_search_is_deterministic_across_jobs():
    cfg = SearchConfig(height=2, samples=12, seed=99, refine_rounds=4)
    serial = search_min(QUADRIC, cfg)
    parallel = search_min(QUADRIC, SearchConfig(**{**cfg.__dict__, "jobs": 2}))
    assert serial == parallel


# --- certification -------------------------------------------------------------------------


def test_certify_conic():
    cert = certify_min(CONIC)
    assert cert.minimum == F(-3, 2)
    assert cert.witness == (0, 1, -1)
    assert cert.constraint_count == 7  # one weight-tie wall plus six box facets


def test_certify_fermat():
    cert = certify_min(FERMAT)
    assert cert.minimum == -8
    assert sorted(cert.witness) == [-1, -1, 1, 1]


def test_certify_quadric():
    cert = certify_min(QUADRIC)
    assert cert.minimum == F(-8, 3)
    assert cert.witness == (1, -1, -1, 1)


def test_certify_budget():
    with pytest.raises(CombinatorialBudgetExceeded) as info:
        certify_min(FERMAT, box_limit=10)
    assert info.value.count == subset_count(FERMAT) > 10


def test_walls_are_homogeneous_and_deduplicated():
    cons = constraints(FERMAT)
    walls = [c for c in cons if c.rhs == 0]
    assert len({c.coeffs for c in walls}) == len(walls)
    assert all(sum(c.coeffs) == 0 for c in walls)  # projected onto the trace hyperplane


@pytest.mark.parametrize("seed", range(6))
def test_certificate_soundness_on_random_supports(seed):
    rng = random.Random(100 + seed)
    n = rng.randint(1, 3)
    s = build_support(n, random_support_rows(rng, n, rng.randint(2, 3), rng.randint(2, 4)))
    cert = certify_min(s)
    assert brute_energy(s.rows, s.n, s.d, cert.witness) == cert.minimum
    for lam in brute_directions(n, 3):
        assert cert.minimum <= brute_energy(s.rows, s.n, s.d, lam) / max(abs(x) for x in lam)
    res = search_min(s, SearchConfig(height=2, samples=10, seed=seed))
    assert cert.minimum <= res.best_score
