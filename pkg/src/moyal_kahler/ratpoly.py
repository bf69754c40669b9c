"""Exact polynomials over Q in the chart variables (p, q, pb, qb).

A :class:`PolyField` is an immutable map from exponent 4-tuples to nonzero
:class:`fractions.Fraction` coefficients. Index 0..3 means p, q, p-bar, q-bar;
the same container is reused for the formal metric variables of the vierbein
ansatz, where only the printed names change.
"""
from __future__ import annotations

import random
import re
from fractions import Fraction
from itertools import product as _iproduct
from math import comb
from typing import Iterable, Mapping, Sequence, Union

from .errors import DegreeError, ParseError

P, Q, PB, QB = 0, 1, 2, 3
COORDS = (P, Q, PB, QB)
NAMES = ("p", "q", "pb", "qb")
CONJ = (PB, QB, P, Q)

MAX_DEGREE = 12

Exps = tuple[int, int, int, int]
Scalar = Union[int, Fraction]

_ZERO: Exps = (0, 0, 0, 0)


def _grlex(e: Exps):
    return (sum(e), e)


class PolyField:
    """Exact multivariate polynomial with rational coefficients.

    Construction canonicalizes: zero coefficients are dropped and the total
    degree is checked against ``max_degree`` (``MAX_DEGREE`` by default).
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Exps, Scalar] | None = None, *, max_degree: int | None = None):
        cap = MAX_DEGREE if max_degree is None else max_degree
        clean = {}
        for e, c in (terms or {}).items():
            if len(e) != 4 or any(k < 0 for k in e):
                raise ValueError(f"bad exponent tuple {e!r}")
            c = Fraction(c)
            if c:
                if sum(e) > cap:
                    raise DegreeError(f"total degree {sum(e)} exceeds cap {cap}")
                clean[tuple(e)] = c
        self._terms = dict(sorted(clean.items(), key=lambda kv: _grlex(kv[0]), reverse=True))
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def const(cls, c: Scalar) -> "PolyField":
        return cls({_ZERO: c})

    @classmethod
    def var(cls, v: int) -> "PolyField":
        e = [0, 0, 0, 0]
        e[v] = 1
        return cls({tuple(e): 1})

    @classmethod
    def monomial(cls, exps: Sequence[int], c: Scalar = 1) -> "PolyField":
        return cls({tuple(exps): c})

    # -- inspection ---------------------------------------------------
    @property
    def terms(self) -> dict[Exps, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(e == _ZERO for e in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get(_ZERO, Fraction(0))

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def degree_in(self, variables: Iterable[int]) -> int:
        vs = tuple(variables)
        return max((sum(e[v] for v in vs) for e in self._terms), default=-1)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PolyField.const(other)
        if not isinstance(other, PolyField):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        return f"PolyField({to_str(self)!r})"

    def __str__(self):
        return to_str(self)

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        return add(self, _coerce(other))

    __radd__ = __add__

    def __neg__(self):
        return PolyField({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return add(self, -_coerce(other))

    def __rsub__(self, other):
        return add(_coerce(other), -self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return PolyField({e: c * other for e, c in self._terms.items()})
        return mul(self, _coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return self * (1 / Fraction(other))

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = PolyField.const(1)
        for _ in range(n):
            out = out * self
        return out


def _coerce(x) -> PolyField:
    if isinstance(x, PolyField):
        return x
    if isinstance(x, (int, Fraction)):
        return PolyField.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to PolyField")


ZERO = PolyField()
ONE = PolyField.const(1)
p, q, pb, qb = (PolyField.var(v) for v in COORDS)


def add(f: PolyField, g: PolyField) -> PolyField:
    out = dict(f._terms)
    for e, c in g._terms.items():
        out[e] = out.get(e, 0) + c
    return PolyField(out)


def mul(f: PolyField, g: PolyField) -> PolyField:
    out: dict[Exps, Fraction] = {}
    for e1, c1 in f._terms.items():
        for e2, c2 in g._terms.items():
            e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3])
            out[e] = out.get(e, 0) + c1 * c2
    return PolyField(out)


def partial(f: PolyField, v: int, times: int = 1) -> PolyField:
    """Formal partial derivative ``times`` times with respect to coordinate ``v``."""
    if v not in COORDS:
        raise ValueError(f"coordinate index must be 0..3, got {v}")
    if times == 0:
        return f
    out = {}
    for e, c in f._terms.items():
        k = e[v]
        if k < times:
            continue
        factor = 1
        for j in range(times):
            factor *= k - j
        ne = list(e)
        ne[v] -= times
        out[tuple(ne)] = c * factor
    return PolyField(out)


def d(f: PolyField, *vs: int) -> PolyField:
    """Iterated derivative, e.g. ``d(f, P, PB)`` is f_{p pbar}."""
    for v in vs:
        f = partial(f, v)
    return f


def conj_swap(f: PolyField) -> PolyField:
    """Swap p<->pb and q<->qb; rational coefficients are self-conjugate."""
    return PolyField({(e[2], e[3], e[0], e[1]): c for e, c in f._terms.items()})


def evaluate(f: PolyField, point: Sequence):
    """Substitute ``point`` (4 numbers); exact for rational input."""
    total = 0
    for e, c in f._terms.items():
        term = c
        for x, k in zip(point, e):
            if k:
                term = term * x**k
        total = total + term
    return total


def substitute(f: PolyField, images: Sequence[PolyField]) -> PolyField:
    """Compose: replace variable i by ``images[i]``."""
    imgs = [_coerce(g) for g in images]
    cache: dict[tuple[int, int], PolyField] = {}

    def power(i, k):
        if (i, k) not in cache:
            cache[(i, k)] = imgs[i] ** k
        return cache[(i, k)]

    out = ZERO
    for e, c in f._terms.items():
        term = PolyField.const(c)
        for i, k in enumerate(e):
            if k:
                term = term * power(i, k)
        out = out + term
    return out


def bidifferential(f: PolyField, g: PolyField, r: int, u: int = PB, w: int = QB) -> PolyField:
    """sum_k C(r,k) (-1)^k  d_u^{r-k} d_w^k f * d_w^{r-k} d_u^k g.

    This is the r-fold contraction with the antisymmetric pair (u, w), with
    no normalization factor.
    """
    out = ZERO
    for k in range(r + 1):
        left = partial(partial(f, u, r - k), w, k)
        if left.is_zero():
            continue
        right = partial(partial(g, w, r - k), u, k)
        if right.is_zero():
            continue
        term = left * right * comb(r, k)
        out = out - term if k % 2 else out + term
    return out


# -- text serialization ----------------------------------------------

def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def to_str(f: PolyField, names: Sequence[str] = NAMES) -> str:
    """Render as ``c * p^a q^b pb^c qb^d`` terms joined by `` + ``."""
    if f.is_zero():
        return "0"
    out = ""
    for e, c in f.items():
        mono = " ".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
        body = f"{_fmt_coeff(abs(c))} * {mono}" if mono else _fmt_coeff(abs(c))
        if not out:
            out = body if c > 0 else "-" + body
        else:
            out += (" + " if c > 0 else " - ") + body
    return out


_TERM_SPLIT = re.compile(r"\s*([+-])\s*")
_FACTOR = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)(?:\^(\d+))?$")
_NUMBER = re.compile(r"^\d+(?:/\d+)?$")


def parse(text: str, names: Sequence[str] = NAMES) -> PolyField:
    """Inverse of :func:`to_str`; also accepts ``-`` separators and bare monomials."""
    index = {n: i for i, n in enumerate(names)}
    s = text.strip()
    if not s:
        raise ParseError("empty polynomial")
    if s[0] not in "+-":
        s = "+" + s
    pieces = _TERM_SPLIT.split(s)[1:]
    if len(pieces) % 2:
        raise ParseError(f"malformed polynomial {text!r}")
    out = ZERO
    for sign, body in zip(pieces[::2], pieces[1::2]):
        coeff = Fraction(1)
        exps = [0, 0, 0, 0]
        tokens = re.split(r"\s*\*\s*|\s+", body.strip())
        if not all(tokens):
            raise ParseError(f"empty factor in {text!r}")
        for tok in tokens:
            if _NUMBER.match(tok):
                coeff *= Fraction(tok)
                continue
            m = _FACTOR.match(tok)
            if not m or m.group(1) not in index:
                raise ParseError(f"unknown factor {tok!r}")
            exps[index[m.group(1)]] += int(m.group(2) or 1)
        out = out + PolyField({tuple(exps): -coeff if sign == "-" else coeff})
    return out


def random_poly(rng: random.Random, max_degree: int = 4, max_terms: int = 5,
                coeff_bound: int = 5, variables: Sequence[int] = COORDS) -> PolyField:
    """Sparse random polynomial with small rational coefficients."""
    monos = [e for e in _iproduct(range(max_degree + 1), repeat=4)
             if sum(e) <= max_degree and all(e[v] == 0 for v in COORDS if v not in variables)]
    out = {}
    for _ in range(rng.randint(1, max_terms)):
        e = rng.choice(monos)
        num = rng.randint(-coeff_bound, coeff_bound)
        den = rng.randint(1, 3)
        out[e] = out.get(e, 0) + Fraction(num, den)
    return PolyField(out)
