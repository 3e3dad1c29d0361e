from fractions import Fraction as F
import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from kstab.envelope import Line
from kstab.errors import DimensionMismatch, NonZeroTrace, NotInvariant
from kstab.polynomial import build_support, parse_polynomial
from kstab.stability import (
    check_genericity,
    compute_weights,
    detect_invariance,
    energy,
    futaki_invariant,
    k_energy_limit,
    phi_lines,
    report,
    variable_penalty,
)

from oracles import (
    brute_energy,
    dot_weights,
    fermat_closed_form,
    fermat_rows,
    random_support_rows,
    random_weights,
)

FERMAT = parse_polynomial("Z0^3 + Z1^3 + Z2^3 + Z3^3")
CONIC = parse_polynomial("Z0*Z1 + Z2^2")
QUADRIC = parse_polynomial("Z0*Z3 - Z1*Z2")
CONE = parse_polynomial("n=3; Z0^3 + Z1^3 + Z2^3 + Z0*Z1*Z2")


def test_weights_examples():
    wd = compute_weights(FERMAT, (3, -1, -1, -1))
    assert wd.w == (9, -3, -3, -3)
    assert wd.w == tuple(dot_weights(FERMAT.rows, (3, -1, -1, -1)))
    assert (wd.lambda_max, wd.delta) == (9, -9)
    assert wd.delta_i == (0, 12, 12, 12)
    assert wd.order == (0, 1, 2, 3)

    wd = compute_weights(CONIC, (1, 0, -1))
    assert wd.w == (1, -2) and wd.lambda_max == 1 and wd.delta_i == (0, 3)

    wd = compute_weights(FERMAT, (0, 0, 0, 0))
    assert set(wd.w) == {0} and wd.lambda_max == 0 and set(wd.delta_i) == {0}


def test_weight_errors():
    with pytest.raises(DimensionMismatch):
        compute_weights(FERMAT, (1, -1))
    with pytest.raises(NonZeroTrace):
        compute_weights(FERMAT, (1, 1, 1, -2))


def test_order_sorts_by_delta():
    wd = compute_weights(FERMAT, (-3, 1, 1, 1))
    assert wd.delta_i == (12, 0, 0, 0)
    assert wd.order == (1, 2, 3, 0)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_normalization_identity(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    s = build_support(n, random_support_rows(rng, n, rng.randint(1, 4), rng.randint(1, 5)))
    wd = compute_weights(s, random_weights(rng, n, den=4))
    assert min(wd.delta_i) == 0 and all(x >= 0 for x in wd.delta_i)
    assert all(dj + wd.delta == -wj for dj, wj in zip(wd.delta_i, wd.w))


def test_phi_lines_examples():
    assert phi_lines(FERMAT, (3, -1, -1, -1), 0) == [Line(-9, 3), Line(3, 0)]
    assert phi_lines(CONIC, (1, 0, -1), 2) == [Line(-1, 0), Line(2, 2)]
    assert phi_lines(FERMAT, (0, 0, 0, 0), 0) == [Line(0, 3), Line(0, 0)]
    with pytest.raises(DimensionMismatch):
        phi_lines(FERMAT, (0, 0, 0, 0), 4)


def test_penalty_examples():
    assert variable_penalty(FERMAT, (3, -1, -1, -1), 0) == 24
    assert variable_penalty(FERMAT, (3, -1, -1, -1), 1) == 0
    assert all(variable_penalty(CONIC, (0, 0, 0), k) == 0 for k in range(3))


@pytest.mark.parametrize(
    "support, lam, expected",
    [
        (FERMAT, (3, -1, -1, -1), 0),
        (FERMAT, (1, 1, 1, -3), -8),
        (FERMAT, (0, 0, 0, 0), 0),
        (FERMAT, (6, -1, -2, -3), -6),
        (FERMAT, (1, 1, -1, -1), -8),
        (CONIC, (1, 0, -1), F(-3, 2)),
        (QUADRIC, (1, -1, -1, 1), F(-8, 3)),
    ],
)
def test_energy_fixtures(support, lam, expected):
    assert brute_energy(support.rows, support.n, support.d, lam) == expected
    assert energy(support, lam) == expected


def test_limit_fixtures():
    assert k_energy_limit(FERMAT, (1, 1, 1, -3)) == F(-16, 3)
    assert k_energy_limit(CONIC, (1, 0, -1)) == F(-3, 2)
    assert k_energy_limit(QUADRIC, (0, 0, 0, 0)) == 0


def test_genericity_examples():
    assert check_genericity(FERMAT, (6, -1, -2, -3)).generic
    g = check_genericity(FERMAT, (1, 1, 1, -3))
    assert not g.generic and (0, 1) in g.delta_ties
    assert not check_genericity(FERMAT, (0, 0, 0, 0)).generic


def test_concurrency_without_delta_ties():
    # cubic in P^1: rows (3,0),(2,1),(0,3) at lam=(1,-1): delta = 0,2,6 distinct;
    # k=0 lines 0+3x, 2+2x, 6+0x meet at x=2; k=1 lines 0, 2+x, 6+3x meet at x=-2
    s = build_support(1, [(3, 0), (2, 1), (0, 3)])
    g = check_genericity(s, (1, -1))
    assert g.delta_ties == () and g.concurrent == ((0, (0, 1, 2)), (1, (0, 1, 2)))


def test_invariance_examples():
    assert detect_invariance(CONE, (1, 1, 1, -3)) == 3
    assert detect_invariance(QUADRIC, (1, 0, 0, -1)) == 0
    assert detect_invariance(FERMAT, (3, -1, -1, -1)) is None


def test_futaki_examples():
    assert futaki_invariant(CONE, (1, 1, 1, -3)) == -8
    assert energy(CONE, (1, 1, 1, -3)) == -8
    assert futaki_invariant(QUADRIC, (1, 0, 0, -1)) == 0
    with pytest.raises(NotInvariant):
        futaki_invariant(FERMAT, (3, -1, -1, -1))


def test_report_examples():
    rep = report(FERMAT, (1, 1, -1, -1))
    assert (rep.energy, rep.energy_reverse) == (-8, -8)
    assert not rep.inequality_holds

    rep = report(QUADRIC, (1, -1, -1, 1))
    assert rep.energy == F(-8, 3) and rep.kappa is None
    assert rep.weight_data.w == (2, -2)
    assert set(rep.penalties) == {0}

    rep = report(FERMAT, (0, 0, 0, 0))
    assert rep.energy == 0 and rep.inequality_holds
    assert rep.limit == 0 and rep.kappa == 0 and rep.futaki == 0


def test_report_invariants():
    rep = report(FERMAT, (6, -1, -2, -3))
    coeff = F((FERMAT.d - 1) * (FERMAT.n + 1), FERMAT.n)
    assert rep.energy == -rep.weight_data.lambda_max * coeff + sum(rep.penalties)
    assert rep.limit == F(2, FERMAT.d) * rep.energy
    assert rep.genericity.generic


def test_non_fano_warns_but_computes():
    cyc = parse_polynomial("Z0^2*Z1 + Z1^2*Z2 + Z2^2*Z0")
    rep = report(cyc, (1, 0, -1))
    assert any("not Fano" in w for w in rep.warnings)
    assert rep.energy == brute_energy(cyc.rows, cyc.n, cyc.d, (1, 0, -1))


# --- properties ---------------------------------------------------------------------


def _random_instance(rng):
    n = rng.randint(1, 4)
    d = rng.randint(1, 4)
    s = build_support(n, random_support_rows(rng, n, d, rng.randint(1, 6)))
    return s, random_weights(rng, n, den=3)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_energy_matches_brute_force(seed):
    s, lam = _random_instance(random.Random(seed))
    assert energy(s, lam) == brute_energy(s.rows, s.n, s.d, lam)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32), st.fractions(min_value=F(1, 9), max_value=20, max_denominator=9))
def test_positive_homogeneity(seed, c):
    s, lam = _random_instance(random.Random(seed))
    assert energy(s, tuple(c * x for x in lam)) == c * energy(s, lam)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_permutation_equivariance(seed):
    rng = random.Random(seed)
    s, lam = _random_instance(rng)
    perm = list(range(s.n + 1))
    rng.shuffle(perm)
    s2 = s.permuted(perm)
    lam2 = tuple(lam[p] for p in perm)
    r1, r2 = report(s, lam), report(s2, lam2)
    assert r1.energy == r2.energy and r1.limit == r2.limit
    assert sorted(r1.penalties) == sorted(r2.penalties)


def test_zero_weights_give_zero():
    for s in (FERMAT, CONIC, QUADRIC, CONE):
        assert energy(s, (0,) * (s.n + 1)) == 0


@pytest.mark.parametrize("n, d", [(n, d) for n in range(2, 7) for d in range(2, n + 1)])
def test_fermat_closed_form(n, d):
    s = build_support(n, fermat_rows(n, d))
    rng = random.Random(n * 10 + d)
    for _ in range(5):
        lam = random_weights(rng, n, bound=20, den=5)
        if sorted(lam)[-1] == sorted(lam)[-2]:
            continue
        assert energy(s, lam) == fermat_closed_form(n, d, lam)


def test_duplicate_monomial_insensitivity():
    rows = list(CONE.rows)
    doubled = build_support(CONE.n, rows + [rows[1]])
    for lam in itertools.islice(itertools.permutations((2, 1, -1, -2)), 8):
        assert energy(doubled, lam) == energy(CONE, lam)
