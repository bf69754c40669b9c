"""Truncated Moyal star product and brackets on :class:`PolyField`.

The noncommutativity matrix is theta * eps with the single block
eps^{pb qb} = 1 = -eps^{qb pb}, so every bidifferential operator here pairs
derivatives in pb and qb only.

Powers of i are never turned into complex floats. A θ-coefficient is a pair
(re, im) of rational polynomials; ``star_r`` hands back the rational part
together with the exponent of i (mod 4), and the series code folds i^2 = -1
into signs.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import NamedTuple, Sequence

from . import ratpoly
from .errors import RealityError
from .ratpoly import PB, QB, ZERO, PolyField

NC_MATRIX = tuple(
    tuple(Fraction(1) if (m, n) == (PB, QB) else Fraction(-1) if (m, n) == (QB, PB) else Fraction(0)
          for n in range(4))
    for m in range(4)
)


class StarTerm(NamedTuple):
    """``coeff * i**ipow``, the value of f *^r g."""
    coeff: PolyField
    ipow: int

    def as_complex(self) -> tuple[PolyField, PolyField]:
        return _times_i_power(self.coeff, ZERO, self.ipow)


def _times_i_power(re: PolyField, im: PolyField, k: int) -> tuple[PolyField, PolyField]:
    k %= 4
    if k == 0:
        return re, im
    if k == 1:
        return -im, re
    if k == 2:
        return -re, -im
    return im, -re


@dataclass(frozen=True)
class ThetaSeries:
    """sum_n θ^n (re[n] + i im[n]), truncated at order ``order``.

    ``exact`` records that no dropped term can be nonzero, i.e. the stored
    series equals the untruncated one.
    """
    re: tuple[PolyField, ...]
    im: tuple[PolyField, ...] = ()
    order: int = 0
    exact: bool = True

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("truncation order must be >= 0")
        n = min(max(len(self.re), len(self.im)), self.order + 1)
        re = list(self.re[:n]) + [ZERO] * (n - len(self.re[:n]))
        im = list(self.im[:n]) + [ZERO] * (n - len(self.im[:n]))
        while re and re[-1].is_zero() and im[-1].is_zero():
            re.pop()
            im.pop()
        object.__setattr__(self, "re", tuple(re))
        object.__setattr__(self, "im", tuple(im))

    @classmethod
    def from_polys(cls, coeffs: Sequence[PolyField], order: int | None = None) -> "ThetaSeries":
        coeffs = [ratpoly._coerce(c) for c in coeffs]
        n = len(coeffs) - 1 if order is None else order
        exact = all(c.is_zero() for c in coeffs[n + 1:])
        return cls(tuple(coeffs), (), max(n, 0), exact)

    @classmethod
    def scalar(cls, f: PolyField, order: int = 0) -> "ThetaSeries":
        return cls((ratpoly._coerce(f),), (), order, True)

    def __len__(self):
        return len(self.re)

    def coeff(self, n: int) -> tuple[PolyField, PolyField]:
        if n < len(self.re):
            return self.re[n], self.im[n]
        return ZERO, ZERO

    def real(self, n: int) -> PolyField:
        """Real θ^n coefficient; raises if it carries an imaginary part."""
        re, im = self.coeff(n)
        if not im.is_zero():
            raise RealityError(f"theta^{n} coefficient has imaginary part {im}")
        return re

    def is_real(self) -> bool:
        return all(c.is_zero() for c in self.im)

    def is_zero(self) -> bool:
        return not self.re

    def same_coeffs(self, other: "ThetaSeries") -> bool:
        """Coefficient-wise equality, ignoring truncation metadata."""
        return self.re == other.re and self.im == other.im

    def imaginary_orders(self) -> list[int]:
        return [n for n, c in enumerate(self.im) if not c.is_zero()]

    def with_order(self, order: int) -> "ThetaSeries":
        return ThetaSeries(self.re, self.im, order, self.exact and order >= len(self.re) - 1)

    def map(self, fn) -> "ThetaSeries":
        """Apply a linear map with rational coefficients to every coefficient."""
        return ThetaSeries(tuple(fn(c) for c in self.re), tuple(fn(c) for c in self.im),
                           self.order, self.exact)

    def partial(self, v: int) -> "ThetaSeries":
        return self.map(lambda c: ratpoly.partial(c, v))

    def __add__(self, other: "ThetaSeries") -> "ThetaSeries":
        other = _as_series(other, self.order)
        n = max(len(self), len(other))
        order = min(self.order, other.order)
        return ThetaSeries(
            tuple(self.coeff(k)[0] + other.coeff(k)[0] for k in range(n)),
            tuple(self.coeff(k)[1] + other.coeff(k)[1] for k in range(n)),
            order, self.exact and other.exact,
        )

    __radd__ = __add__

    def __neg__(self):
        return self.map(lambda c: -c)

    def __sub__(self, other):
        return self + (-_as_series(other, self.order))

    def __rsub__(self, other):
        return _as_series(other, self.order) - self

    def scale(self, c) -> "ThetaSeries":
        return self.map(lambda f: f * c)

    def to_json(self) -> list[dict]:
        return [{"order": n, "re": ratpoly.to_str(r), "im": ratpoly.to_str(i)}
                for n, (r, i) in enumerate(zip(self.re, self.im))]

    def __str__(self):
        if self.is_zero():
            return "0"
        bits = []
        for n, (r, i) in enumerate(zip(self.re, self.im)):
            if r.is_zero() and i.is_zero():
                continue
            c = str(r) if i.is_zero() else f"({r}) + i({i})"
            bits.append(f"θ^{n}[{c}]")
        return " + ".join(bits)


def _as_series(x, order: int) -> ThetaSeries:
    if isinstance(x, ThetaSeries):
        return x
    return ThetaSeries.scalar(ratpoly._coerce(x), order)


def series_mul(a: ThetaSeries, b: ThetaSeries, order: int) -> ThetaSeries:
    """Cauchy product with pointwise coefficient products (commutative)."""
    re, im = [ZERO] * (order + 1), [ZERO] * (order + 1)
    for i in range(min(len(a), order + 1)):
        ar, ai = a.coeff(i)
        for j in range(min(len(b), order + 1 - i)):
            br, bi = b.coeff(j)
            re[i + j] = re[i + j] + ar * br - ai * bi
            im[i + j] = im[i + j] + ar * bi + ai * br
    exact = a.exact and b.exact and len(a) + len(b) - 2 <= order
    return ThetaSeries(tuple(re), tuple(im), order, exact)


def poisson_bracket(f: PolyField, g: PolyField) -> PolyField:
    """f_pb g_qb - f_qb g_pb."""
    return ratpoly.partial(f, PB) * ratpoly.partial(g, QB) - ratpoly.partial(f, QB) * ratpoly.partial(g, PB)


def _bar_degree(f: PolyField) -> int:
    return f.degree_in((PB, QB))


def star_r(f: PolyField, g: PolyField, r: int) -> StarTerm:
    """f *^r g = (1/r!) (i/2)^r eps...eps d...f d...g, as (rational part, power of i)."""
    if r < 0:
        raise ValueError("r must be >= 0")
    if r > min(_bar_degree(f), _bar_degree(g)) and r > 0:
        return StarTerm(ZERO, r % 4)
    core = ratpoly.bidifferential(f, g, r)
    return StarTerm(core * Fraction(1, factorial(r) * 2**r), r % 4)


def _star_r_complex(a: tuple[PolyField, PolyField], b: tuple[PolyField, PolyField], r: int):
    (ar, ai), (br, bi) = a, b
    c = lambda x, y: star_r(x, y, r).coeff
    re = c(ar, br) - c(ai, bi)
    im = c(ar, bi) + c(ai, br)
    return _times_i_power(re, im, r)


def _series_bar_degree(s: ThetaSeries, n: int) -> int:
    r, i = s.coeff(n)
    return max(_bar_degree(r), _bar_degree(i))


def star_series(a: ThetaSeries, b: ThetaSeries, order: int) -> ThetaSeries:
    """(a ⋆ b) truncated at θ^order, coefficient n = sum_{i+j+r=n} a_i *^r b_j."""
    if order < 0:
        raise ValueError("order must be >= 0")
    re, im = [ZERO] * (order + 1), [ZERO] * (order + 1)
    exact = a.exact and b.exact
    for i in range(len(a)):
        for j in range(len(b)):
            top = min(_series_bar_degree(a, i), _series_bar_degree(b, j))
            if top < 0:
                continue
            if i + j + top > order:
                exact = False
            for r in range(0, min(top, order - i - j) + 1):
                x, y = _star_r_complex(a.coeff(i), b.coeff(j), r)
                re[i + j + r] = re[i + j + r] + x
                im[i + j + r] = im[i + j + r] + y
    return ThetaSeries(tuple(re), tuple(im), order, exact)


def star_product(f: PolyField, g: PolyField, N: int) -> ThetaSeries:
    """f ⋆ g to order θ^N; odd orders come out purely imaginary for real f, g."""
    return star_series(ThetaSeries.scalar(f), ThetaSeries.scalar(g), N)


def moyal_bracket_series(a: ThetaSeries, b: ThetaSeries, order: int) -> ThetaSeries:
    """{a, b}_MB = (a⋆b - b⋆a) / (iθ), truncated at θ^order.

    The 1/(iθ) is an index shift of the star commutator: its θ^0 term always
    cancels, and θ^{n+1} (times -i) becomes θ^n.
    """
    comm = star_series(a, b, order + 1) - star_series(b, a, order + 1)
    r0, i0 = comm.coeff(0)
    assert r0.is_zero() and i0.is_zero(), "star commutator has a theta^0 term"
    re, im = [], []
    for n in range(order + 1):
        x, y = comm.coeff(n + 1)
        # (x + i y) * (-i) = y - i x
        re.append(y)
        im.append(-x)
    return ThetaSeries(tuple(re), tuple(im), order, comm.exact)


def moyal_bracket(f: PolyField, g: PolyField, N: int) -> ThetaSeries:
    """Moyal bracket of real polynomials; certified real, only even θ powers."""
    out = moyal_bracket_series(ThetaSeries.scalar(f), ThetaSeries.scalar(g), N)
    if not out.is_real():
        raise RealityError(f"Moyal bracket has imaginary orders {out.imaginary_orders()}")
    return out


def only_even_orders(s: ThetaSeries) -> bool:
    """Real series whose odd θ orders all vanish."""
    return s.is_real() and all(c.is_zero() for c in s.re[1::2])
