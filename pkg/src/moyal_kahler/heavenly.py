"""Residuals and integrability checks for the (deformed) first heavenly equation.

Everything here is polynomial: residuals are returned as exact polynomials
(or θ-series of them) and nothing is ever divided, so singular metric blocks
are legal input.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from . import ratpoly
from .moyal import ThetaSeries, moyal_bracket_series, series_mul, star_series
from .ratpoly import P, PB, Q, QB, ONE, PolyField, d

HOLO = (P, Q)
ANTI = (PB, QB)


@dataclass(frozen=True)
class KahlerMetricBlock:
    """Omega_{i jbar}: rows i in (p, q), columns jbar in (pb, qb)."""
    entries: tuple[tuple[PolyField, PolyField], tuple[PolyField, PolyField]]

    @classmethod
    def from_potential(cls, omega: PolyField) -> "KahlerMetricBlock":
        return cls(tuple(tuple(d(omega, i, j) for j in ANTI) for i in HOLO))

    @property
    def pp(self):
        return self.entries[0][0]

    @property
    def pq(self):
        return self.entries[0][1]

    @property
    def qp(self):
        return self.entries[1][0]

    @property
    def qq(self):
        return self.entries[1][1]

    def det(self) -> PolyField:
        return self.pp * self.qq - self.pq * self.qp

    def is_constant(self) -> bool:
        return all(e.is_constant() for row in self.entries for e in row)


def ma_residual(omega: PolyField) -> PolyField:
    """Omega_{p pb} Omega_{q qb} - Omega_{p qb} Omega_{q pb} - 1."""
    return KahlerMetricBlock.from_potential(omega).det() - 1


def deformed_bracket(omega_hat: ThetaSeries, order: int) -> ThetaSeries:
    """{Omega_p, Omega_q}_MB for the full series Omega-hat."""
    return moyal_bracket_series(omega_hat.partial(P), omega_hat.partial(Q), order)


def deformed_residual(omega_hat: ThetaSeries, r: int) -> PolyField:
    """θ^r coefficient of {Omega_p, Omega_q}_MB minus its target (1 at r=0, else 0).

    For r >= 1 this is the order-r condition
    sum_s sum_m dp Omega^(m) *^{2s+1} dq Omega^(r-m-2s) times the -2i
    normalization, which is nonzero and so does not change the zero set.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    if omega_hat.order < r:
        raise ValueError(f"series truncated at order {omega_hat.order} < {r}")
    coeff = deformed_bracket(omega_hat, r).real(r)
    return coeff - 1 if r == 0 else coeff


def first_order_residual(omega: PolyField, omega1: PolyField) -> PolyField:
    """Linearization of the heavenly equation around Omega in the direction Omega1."""
    g0 = KahlerMetricBlock.from_potential(omega)
    g1 = KahlerMetricBlock.from_potential(omega1)
    return g0.pp * g1.qq + g1.pp * g0.qq - g0.pq * g1.qp - g1.pq * g0.qp


def residual_report(residual: PolyField, order: int) -> dict:
    return {"order": order, "residual_polynomial": ratpoly.to_str(residual),
            "is_zero": residual.is_zero()}


# -- the deformed 2-form ----------------------------------------------

LambdaGraded = dict  # lambda power -> ThetaSeries


def _lg_add(a: LambdaGraded, b: LambdaGraded) -> LambdaGraded:
    out = dict(a)
    for k, s in b.items():
        out[k] = out[k] + s if k in out else s
    return {k: s for k, s in out.items() if not s.is_zero()}


def _lg_scale(a: LambdaGraded, c) -> LambdaGraded:
    return {k: s.scale(c) for k, s in a.items() if c}


@dataclass(frozen=True)
class TwoForm:
    """sum over mu < nu of coeffs[(mu, nu)] dx^mu ^ dx^nu.

    Each coefficient is graded by powers of the formal parameter lambda:
    ``coeffs[(mu, nu)][k]`` multiplies lambda^k.
    """
    coeffs: dict
    order: int = 0

    def component(self, mu: int, nu: int) -> LambdaGraded:
        if mu == nu:
            return {}
        if mu < nu:
            return self.coeffs.get((mu, nu), {})
        return _lg_scale(self.coeffs.get((nu, mu), {}), -1)

    def theta_slice(self, n: int) -> dict:
        """θ^n part of every component as {(mu, nu): {lambda power: PolyField}}."""
        return {mn: {k: s.real(n) for k, s in comp.items()} for mn, comp in self.coeffs.items()}


def build_two_form(omega_hat: ThetaSeries) -> TwoForm:
    """dp^dq + lambda (Omega_{i jbar} dx^i ^ dx^jbar) + lambda^2 dpb^dqb."""
    N = omega_hat.order
    one = ThetaSeries.scalar(ONE, N)
    coeffs = {(P, Q): {0: one}, (PB, QB): {2: one}}
    for i in HOLO:
        for j in ANTI:
            coeffs[(i, j)] = {1: omega_hat.partial(i).partial(j)}
    coeffs = {k: {g: s for g, s in v.items() if not s.is_zero()} for k, v in coeffs.items()}
    return TwoForm({k: v for k, v in coeffs.items() if v}, N)


def exterior_derivative(w: TwoForm) -> dict:
    """Coefficients of dw on dx^a ^ dx^b ^ dx^c, a < b < c."""
    out = {}
    for a, b, c in combinations(range(4), 3):
        acc: LambdaGraded = {}
        for sign, v, pair in ((1, a, (b, c)), (-1, b, (a, c)), (1, c, (a, b))):
            comp = w.component(*pair)
            acc = _lg_add(acc, {k: s.partial(v).scale(sign) for k, s in comp.items()})
        out[(a, b, c)] = acc
    return out


def is_closed(w: TwoForm) -> bool:
    return all(not v for v in exterior_derivative(w).values())


def _perm_sign(seq) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


# dp ^ dpb ^ dq ^ dqb in terms of dx^0 ^ dx^1 ^ dx^2 ^ dx^3
_ORIENTATION = _perm_sign((P, PB, Q, QB))


@dataclass(frozen=True)
class FourFormCoeff:
    """Coefficient c in w ^ w = c * (2 dp ^ dpb ^ dq ^ dqb), graded by lambda.

    The factor 2 is the Pfaffian normalization: for w = sum_{mu<nu} w_{mu nu}
    dx^mu ^ dx^nu with commuting coefficients, w ^ w = 2 Pf(w) vol.
    """
    value: LambdaGraded = field(default_factory=dict)

    def at(self, lam_power: int) -> ThetaSeries | None:
        return self.value.get(lam_power)

    def is_zero(self) -> bool:
        return not self.value


def wedge_self(w: TwoForm, N: int, product: str = "star") -> FourFormCoeff:
    """w ^ w with coefficient products taken as ``product`` ('star' or 'pointwise')."""
    if product == "star":
        mult = star_series
    elif product == "pointwise":
        mult = series_mul
    else:
        raise ValueError(f"unknown product {product!r}")
    pairs = list(combinations(range(4), 2))
    acc: LambdaGraded = {}
    for A in pairs:
        for B in pairs:
            if set(A) & set(B):
                continue
            sign = _perm_sign(A + B)
            for ka, sa in w.component(*A).items():
                for kb, sb in w.component(*B).items():
                    term = mult(sa, sb, N).scale(sign * _ORIENTATION)
                    acc = _lg_add(acc, {ka + kb: term})
    return FourFormCoeff(_lg_scale(acc, Fraction(1, 2)))


# -- Kähler-compatibility properties -----------------------------------

@dataclass(frozen=True)
class DetCondition:
    """det Omega-hat_{i jbar} - 1 order by order, with both product conventions."""
    ordinary: ThetaSeries
    star: ThetaSeries

    @property
    def agree(self) -> bool:
        return self.ordinary.same_coeffs(self.star)

    def divergence(self) -> ThetaSeries:
        return self.star - self.ordinary


def _block_series(omega_hat: ThetaSeries):
    return [[omega_hat.partial(i).partial(j) for j in ANTI] for i in HOLO]


def det_condition_series(omega_hat: ThetaSeries, N: int) -> DetCondition:
    g = _block_series(omega_hat)
    one = ThetaSeries.scalar(ONE, N)
    ordinary = series_mul(g[0][0], g[1][1], N) - series_mul(g[0][1], g[1][0], N) - one
    star = star_series(g[0][0], g[1][1], N) - star_series(g[0][1], g[1][0], N) - one
    return DetCondition(ordinary, star)


@dataclass(frozen=True)
class HermiticityReport:
    hermitian: bool
    holomorphic_blocks_vanish: bool

    def __bool__(self):
        return self.hermitian


def hermiticity_check(omega_n: PolyField) -> HermiticityReport:
    """Reality of Omega_{i jbar}: conj_swap(Omega_{i jbar}) == Omega_{j ibar}.

    The vanishing of Omega_{ij} and Omega_{ibar jbar} (only true in the Kähler
    gauge) is reported separately and does not affect the verdict.
    """
    block = KahlerMetricBlock.from_potential(omega_n).entries
    hermitian = all(ratpoly.conj_swap(block[i][j]) == block[j][i] for i in range(2) for j in range(2))
    holo = all(d(omega_n, a, b).is_zero() for a in HOLO for b in HOLO)
    anti = all(d(omega_n, a, b).is_zero() for a in ANTI for b in ANTI)
    return HermiticityReport(hermitian, holo and anti)


def potential_series(*coeffs: PolyField, order: int | None = None) -> ThetaSeries:
    """Omega-hat = sum_n θ^n coeffs[n]."""
    return ThetaSeries.from_polys(list(coeffs), order)

