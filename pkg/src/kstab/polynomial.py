"""Monomial supports of homogeneous polynomials.

Text grammar (whitespace ignored)::

    poly    := [ "n=" INT ";" ] term { ("+" | "-") term }
    term    := [ RATIONAL ] [ "*" ] factor { [ "*" ] factor }  |  RATIONAL
    factor  := "Z" INT [ "^" INT ]

Example: ``"n=3; Z0^3 + Z1^3 - 2/3 Z2*Z3^2"``.  The Unicode minus sign is
accepted as ``-``.  Coefficients are kept for fidelity only; every quantity
computed downstream depends on the exponent rows alone.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    DivisibleByVariable,
    NotHomogeneous,
    PolynomialSyntaxError,
    SchemaError,
    SupportError,
    VanishingCoefficient,
)

__all__ = [
    "Monomial",
    "Support",
    "ValidationReport",
    "build_support",
    "parse_polynomial",
    "parse_support_json",
    "load_support",
    "validate_support",
    "serialize_support",
    "support_to_json",
]


@dataclass(frozen=True, order=True)
class Monomial:
    exponents: tuple[int, ...]
    coefficient: Fraction = Fraction(1)

    @property
    def degree(self) -> int:
        return sum(self.exponents)


@dataclass(frozen=True)
class Support:
    """Exponent rows of ``F`` in canonical order.

    Canonical order is the lex monomial order with ``Z0 > Z1 > ... > Zn``,
    i.e. exponent vectors sorted lexicographically, largest first.

    Build instances with :func:`build_support`; the constructor itself does
    not merge or validate.
    """

    n: int
    d: int
    monomials: tuple[Monomial, ...]

    @property
    def rows(self) -> tuple[tuple[int, ...], ...]:
        return tuple(m.exponents for m in self.monomials)

    @property
    def coefficients(self) -> tuple[Fraction, ...]:
        return tuple(m.coefficient for m in self.monomials)

    def __len__(self) -> int:
        return len(self.monomials)

    def permuted(self, perm: Sequence[int]) -> Support:
        """Relabel variables: new variable ``i`` is old variable ``perm[i]``."""
        rows = [tuple(r[p] for p in perm) for r in self.rows]
        return build_support(self.n, rows, self.coefficients)


@dataclass(frozen=True)
class ValidationReport:
    n: int
    d: int
    fano: bool
    zero_exponent_witnesses: tuple[int, ...]  # per variable: index of a monomial free of it
    warnings: tuple[str, ...] = field(default=())


def _check_rows(n: int, rows: Sequence[Sequence[int]]) -> int:
    if n < 1:
        raise SupportError(f"ambient dimension must be at least 1, got n={n}")
    if not rows:
        raise SupportError("polynomial has no monomials")
    degrees = set()
    for r in rows:
        if len(r) != n + 1:
            raise SupportError(f"exponent row {list(r)} does not have n+1={n + 1} entries")
        if any((not isinstance(a, int)) or isinstance(a, bool) or a < 0 for a in r):
            raise SupportError(f"exponent row {list(r)} must hold nonnegative integers")
        degrees.add(sum(r))
    if len(degrees) > 1:
        raise NotHomogeneous(f"NotHomogeneous: monomial degrees {sorted(degrees)}")
    d = degrees.pop()
    if d < 1:
        raise SupportError("a constant polynomial does not define a hypersurface")
    return d


def _zero_witnesses(n: int, rows: Sequence[Sequence[int]]) -> tuple[int, ...]:
    out = []
    for k in range(n + 1):
        hit = next((j for j, r in enumerate(rows) if r[k] == 0), None)
        if hit is None:
            raise DivisibleByVariable(k)
        out.append(hit)
    return tuple(out)


def build_support(
    n: int,
    rows: Iterable[Sequence[int]],
    coefficients: Iterable | None = None,
    d: int | None = None,
) -> Support:
    """Merge duplicate rows, sort canonically and validate."""
    rows = [tuple(r) for r in rows]
    coeffs = [Fraction(1)] * len(rows) if coefficients is None else [Fraction(c) for c in coefficients]
    if len(coeffs) != len(rows):
        raise SchemaError("coefficients and monomials differ in length")
    degree = _check_rows(n, rows)
    if d is not None and d != degree:
        raise NotHomogeneous(f"NotHomogeneous: declared degree {d}, monomials have degree {degree}")
    merged: dict[tuple[int, ...], Fraction] = {}
    for r, c in zip(rows, coeffs):
        if c == 0:
            raise VanishingCoefficient(f"VanishingCoefficient: zero coefficient on {list(r)}")
        merged[r] = merged.get(r, Fraction(0)) + c
    for r, c in merged.items():
        if c == 0:
            raise VanishingCoefficient(f"VanishingCoefficient: merged coefficient of {list(r)} is zero")
    support = Support(n, degree, tuple(Monomial(r, merged[r]) for r in sorted(merged, reverse=True)))
    _zero_witnesses(n, support.rows)
    return support


def validate_support(support: Support) -> ValidationReport:
    """Re-check every Support invariant; raise on violation, warn on non-Fano."""
    rows = support.rows
    degree = _check_rows(support.n, rows)
    if degree != support.d:
        raise NotHomogeneous(f"NotHomogeneous: declared degree {support.d}, monomials have degree {degree}")
    if len(set(rows)) != len(rows):
        raise SupportError("duplicate exponent rows; build the support with build_support to merge them")
    if any(m.coefficient == 0 for m in support.monomials):
        raise VanishingCoefficient("VanishingCoefficient: zero coefficient")
    witnesses = _zero_witnesses(support.n, rows)
    warnings = []
    fano = support.d <= support.n
    if not fano:
        warnings.append(
            f"d={support.d} > n={support.n}: the hypersurface is not Fano; values are still computed"
        )
    return ValidationReport(support.n, support.d, fano, witnesses, tuple(warnings))


# --- text parser -----------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<var>[Zz]\d+)|(?P<op>[-+*^;=])|(?P<n>n))")


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text.replace("−", "-")
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        src = self.text
        while pos < len(src):
            if src[pos].isspace():
                pos += 1
                continue
            m = _TOKEN.match(src, pos)
            if m is None or m.end() == pos:
                raise PolynomialSyntaxError(f"unexpected character {src[pos]!r}", pos)
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", "", len(self.text))

    def take(self, kind: str, value: str | None = None):
        tok = self.peek()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            found = tok[1] or "end of input"
            raise PolynomialSyntaxError(f"expected {want!r}, found {found!r}", tok[2])
        self.i += 1
        return tok

    def header(self) -> int | None:
        if self.peek()[0] != "n":
            return None
        self.take("n")
        self.take("op", "=")
        kind, value, pos = self.peek()
        if kind != "num" or "/" in value:
            raise PolynomialSyntaxError("expected an integer after 'n='", pos)
        self.i += 1
        self.take("op", ";")
        return int(value)

    def term(self, sign: int) -> tuple[Fraction, dict[int, int]]:
        coeff = Fraction(sign)
        powers: dict[int, int] = {}
        kind, value, pos = self.peek()
        if kind == "num":
            coeff *= Fraction(value)
            self.i += 1
            if self.peek()[:2] == ("op", "*"):
                self.i += 1
                if self.peek()[0] != "var":
                    raise PolynomialSyntaxError("expected a variable after '*'", self.peek()[2])
        elif kind != "var":
            raise PolynomialSyntaxError(f"expected a term, found {value or 'end of input'!r}", pos)
        while True:
            kind, value, pos = self.peek()
            if kind == "op" and value == "*":
                self.i += 1
                kind, value, pos = self.peek()
                if kind != "var":
                    raise PolynomialSyntaxError("expected a variable after '*'", pos)
            if kind != "var":
                break
            self.i += 1
            k = int(value[1:])
            e = 1
            if self.peek()[:2] == ("op", "^"):
                self.i += 1
                ekind, evalue, epos = self.peek()
                if ekind != "num" or "/" in evalue:
                    raise PolynomialSyntaxError("expected an integer exponent", epos)
                self.i += 1
                e = int(evalue)
            powers[k] = powers.get(k, 0) + e
        return coeff, powers

    def polynomial(self):
        n = self.header()
        terms = []
        sign = 1
        kind, value, _ = self.peek()
        if kind == "op" and value in "+-":
            sign = -1 if value == "-" else 1
            self.i += 1
        terms.append(self.term(sign))
        while True:
            kind, value, pos = self.peek()
            if kind == "end":
                break
            if kind == "op" and value in "+-":
                self.i += 1
                terms.append(self.term(-1 if value == "-" else 1))
            else:
                raise PolynomialSyntaxError(f"expected '+' or '-', found {value!r}", pos)
        return n, terms


def parse_polynomial(text: str) -> Support:
    """Parse the text grammar into a validated :class:`Support`."""
    n, terms = _Parser(text).polynomial()
    top = max((k for _, powers in terms for k in powers), default=0)
    if n is None:
        n = top
    elif top > n:
        raise SupportError(f"variable Z{top} exceeds the declared n={n}")
    rows = []
    coeffs = []
    for coeff, powers in terms:
        row = [0] * (n + 1)
        for k, e in powers.items():
            row[k] = e
        rows.append(row)
        coeffs.append(coeff)
    return build_support(n, rows, coeffs)


def parse_support_json(data: bytes | str) -> Support:
    """Read ``{"n", "d", "monomials", ["coefficients"]}``."""
    try:
        obj = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise SchemaError("top-level JSON value must be an object")
    for key in ("n", "d", "monomials"):
        if key not in obj:
            raise SchemaError(f"missing field {key!r}")
    unknown = set(obj) - {"n", "d", "monomials", "coefficients"}
    if unknown:
        raise SchemaError(f"unknown fields {sorted(unknown)}")
    n, d, mons = obj["n"], obj["d"], obj["monomials"]
    if not isinstance(n, int) or isinstance(n, bool) or not isinstance(d, int) or isinstance(d, bool):
        raise SchemaError("'n' and 'd' must be integers")
    if not isinstance(mons, list) or not all(isinstance(r, list) for r in mons):
        raise SchemaError("'monomials' must be a list of integer lists")
    for r in mons:
        if not all(isinstance(a, int) and not isinstance(a, bool) for a in r):
            raise SchemaError("exponents must be integers")
    coeffs = obj.get("coefficients")
    if coeffs is not None:
        if not isinstance(coeffs, list):
            raise SchemaError("'coefficients' must be a list")
        try:
            coeffs = [Fraction(c) if isinstance(c, (int, str)) and not isinstance(c, bool) else _bad(c) for c in coeffs]
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"bad coefficient: {exc}") from exc
    return build_support(n, mons, coeffs, d=d)


def _bad(c):
    raise ValueError(f"{c!r} is not an integer or a 'p/q' string")


def load_support(data: bytes, kind: str) -> Support:
    """Dispatch on input kind: ``"json"`` or ``"poly"``."""
    if kind == "json":
        return parse_support_json(data)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise SupportError(f"input is not UTF-8: {exc}") from exc
    return parse_polynomial(text)


# --- serialization ---------------------------------------------------------


def _term(m: Monomial) -> tuple[str, str]:
    c = m.coefficient
    sign = "-" if c < 0 else "+"
    mag = abs(c)
    factors = []
    for k, e in enumerate(m.exponents):
        if e == 1:
            factors.append(f"Z{k}")
        elif e > 1:
            factors.append(f"Z{k}^{e}")
    body = "*".join(factors)
    if mag != 1:
        body = f"{mag}*{body}"
    return sign, body


def serialize_support(support: Support) -> str:
    """Canonical text form; ``parse_polynomial`` inverts it exactly."""
    parts = []
    for i, m in enumerate(support.monomials):
        sign, body = _term(m)
        if i == 0:
            parts.append(body if sign == "+" else f"-{body}")
        else:
            parts.append(f"{sign} {body}")
    return f"n={support.n}; " + " ".join(parts)


def support_to_json(support: Support) -> str:
    obj = {
        "n": support.n,
        "d": support.d,
        "monomials": [list(r) for r in support.rows],
        "coefficients": [str(c) for c in support.coefficients],
    }
    return json.dumps(obj, sort_keys=True)
