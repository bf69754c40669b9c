"""Vierbein machinery: classical frame, order-n metric, first-order ansatz solvers,
and reconstruction of the potential corrections.

Layout: a :class:`VierbeinOrder` stores ``entries[a - 1][mu]`` = e^a_mu, i.e.
flat index a = 1..4 down the rows and mu in (p, q, pb, qb) across, the same
shape as the printed classical frame.

The ansatz coefficients of the first-order solutions are affine in the four
metric entries Omega_{p pb}, Omega_{p qb}, Omega_{q pb}, Omega_{q qb}. Those
are held as formal variables in a :class:`PolyField` (index 0..3 in that
order) so constraint polynomials can be checked symbolically.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from . import ratpoly
from .errors import InconsistentAnsatz, InconsistentC, NonConstantEntries, ZeroDenominator
from .heavenly import KahlerMetricBlock
from .ratpoly import P, PB, Q, QB, ONE, ZERO, PolyField, d

# formal metric variables
OPP, OPQ, OQP, OQQ = 0, 1, 2, 3
METRIC_NAMES = ("Opp", "Opq", "Oqp", "Oqq")
_a, _b, _c, _d = (PolyField.var(v) for v in (OPP, OPQ, OQP, OQQ))

FLAT_METRIC = (
    (0, 1, 0, 0),
    (1, 0, 0, 0),
    (0, 0, 0, 1),
    (0, 0, 1, 0),
)

# e^a_mu -> (row, column)
COMPONENTS = {
    "e1_pb": (0, PB), "e1_qb": (0, QB),
    "e2_p": (1, P), "e2_q": (1, Q),
    "e3_pb": (2, PB), "e3_qb": (2, QB),
    "e4_p": (3, P), "e4_q": (3, Q),
}

GREEK = ("alpha", "beta", "gamma", "delta", "sigma")
PRIMES = ("", "_p", "_pp", "_ppp")
COEFF_NAMES = tuple(g + s for s in PRIMES for g in GREEK)
# Greek letter -> formal variable it multiplies (alpha is the constant term)
_GREEK_VAR = {"alpha": ONE, "beta": _a, "gamma": _d, "delta": _b, "sigma": _c}


@dataclass(frozen=True)
class VierbeinOrder:
    entries: tuple[tuple[PolyField, ...], ...]

    @classmethod
    def zero(cls) -> "VierbeinOrder":
        return cls(tuple((ZERO,) * 4 for _ in range(4)))

    @classmethod
    def from_components(cls, comps: Mapping[str, PolyField | int | Fraction]) -> "VierbeinOrder":
        rows = [[ZERO] * 4 for _ in range(4)]
        for name, val in comps.items():
            if name not in COMPONENTS:
                raise KeyError(f"{name!r} is outside the ansatz sparsity pattern")
            r, c = COMPONENTS[name]
            rows[r][c] = ratpoly._coerce(val)
        return cls(tuple(tuple(r) for r in rows))

    def e(self, a: int, mu: int) -> PolyField:
        """e^a_mu with a in 1..4."""
        return self.entries[a - 1][mu]

    def component(self, name: str) -> PolyField:
        r, c = COMPONENTS[name]
        return self.entries[r][c]

    def is_constant(self) -> bool:
        return all(x.is_constant() for row in self.entries for x in row)

    def respects_ansatz(self) -> bool:
        allowed = set(COMPONENTS.values())
        return all(self.entries[r][c].is_zero()
                   for r in range(4) for c in range(4) if (r, c) not in allowed)


@dataclass(frozen=True)
class Vierbein:
    orders: tuple[VierbeinOrder, ...]


def classical_vierbein(omega: PolyField) -> VierbeinOrder:
    g = KahlerMetricBlock.from_potential(omega)
    return VierbeinOrder((
        (ZERO, ZERO, g.pp, g.pq),
        (ONE, ZERO, ZERO, ZERO),
        (ZERO, ZERO, g.qp, g.qq),
        (ZERO, ONE, ZERO, ZERO),
    ))


def metric_order_n(vb: Vierbein, n: int) -> tuple[tuple[PolyField, ...], ...]:
    """g^(n)_{mu nu} = sum_m e^(m)a_mu e^(n-m)b_nu eta_ab."""
    if n < 0 or n >= len(vb.orders):
        raise ValueError(f"vierbein has orders 0..{len(vb.orders) - 1}, asked for {n}")
    g = [[ZERO] * 4 for _ in range(4)]
    for m in range(n + 1):
        left, right = vb.orders[m].entries, vb.orders[n - m].entries
        for a in range(4):
            for b in range(4):
                if not FLAT_METRIC[a][b]:
                    continue
                for mu in range(4):
                    if left[a][mu].is_zero():
                        continue
                    for nu in range(4):
                        if right[b][nu].is_zero():
                            continue
                        g[mu][nu] = g[mu][nu] + left[a][mu] * right[b][nu]
    return tuple(tuple(r) for r in g)


def kahler_block_metric(omega: PolyField) -> tuple[tuple[PolyField, ...], ...]:
    """4x4 metric with the Omega_{i jbar} block off the diagonal."""
    g = [[ZERO] * 4 for _ in range(4)]
    for i in (P, Q):
        for j in (PB, QB):
            g[i][j] = g[j][i] = d(omega, i, j)
    return tuple(tuple(r) for r in g)


# -- ansatz parameters ------------------------------------------------

def _frac(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    return Fraction(x)


@dataclass(frozen=True)
class AnsatzParams:
    """Coefficients of one first-order vierbein ansatz.

    ``coeffs`` is keyed by ``alpha, beta, ..., sigma`` with suffixes ``_p``,
    ``_pp``, ``_ppp`` for one, two and three primes, plus ``A`` and ``A_p``.
    ``C`` is None until a solver has fixed it.
    """
    case: str
    coeffs: dict[str, Fraction] = field(default_factory=dict)
    C: Fraction | None = None

    def get(self, name: str) -> Fraction:
        return self.coeffs.get(name, Fraction(0))

    def to_json(self) -> dict:
        out = {"case": self.case}
        for k in (*COEFF_NAMES, "A", "A_p"):
            if k in self.coeffs:
                out[k] = _fraction_str(self.coeffs[k])
        if self.C is not None:
            out["C"] = _fraction_str(self.C)
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "AnsatzParams":
        obj = dict(obj)
        case = str(obj.pop("case", "I")).upper()
        if case not in ("I", "II"):
            raise ValueError(f"case must be I or II, got {case!r}")
        C = obj.pop("C", None)
        unknown = set(obj) - set(COEFF_NAMES) - {"A", "A_p"}
        if unknown:
            raise ValueError(f"unknown coefficient names {sorted(unknown)}")
        return cls(case, {k: _frac(v) for k, v in obj.items()}, None if C is None else _frac(C))

    @classmethod
    def load(cls, path: str | Path) -> "AnsatzParams":
        return cls.from_json(json.loads(Path(path).read_text()))


def _fraction_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _affine(params: AnsatzParams, suffix: str) -> PolyField:
    out = ZERO
    for g in GREEK:
        out = out + _GREEK_VAR[g] * params.get(g + suffix)
    return out


def _as_params(free, case: str) -> AnsatzParams:
    if isinstance(free, AnsatzParams):
        if free.case != case:
            raise ValueError(f"expected case {case} parameters, got case {free.case}")
        return free
    free = dict(free)
    free.setdefault("case", case)
    return AnsatzParams.from_json(free)


def _fill(given: AnsatzParams, fixed: Mapping[str, Fraction]) -> dict[str, Fraction]:
    coeffs = dict(given.coeffs)
    for k, v in fixed.items():
        if k in coeffs and coeffs[k] != v:
            raise InconsistentAnsatz(f"{k} = {coeffs[k]} conflicts with solved value {v}")
        coeffs[k] = v
    return coeffs


CASE_I_FREE = ("alpha", "alpha_p", "alpha_pp", "alpha_ppp", "beta", "gamma", "delta", "sigma", "beta_ppp")
CASE_II_FREE = ("beta", "gamma_p", "A", "A_p")


def solve_case_I(free) -> AnsatzParams:
    """Complete a Case I ansatz (Omega1_{p jbar} = C Omega1_{q jbar}).

    Free: alpha, alpha', alpha'', alpha''', beta, gamma, delta, sigma, beta'''.
    The quadratic coefficients are fixed to gamma'' = sigma''' = -delta'' =
    -beta''' with the remaining double/triple primes zero; C then follows from
    alpha + alpha' + gamma'' + C beta''' = 0 and gamma', sigma', beta', delta'
    from the other four linear relations.
    """
    prm = _as_params(free, "I")
    g = prm.get
    b3 = g("beta_ppp")
    denom = b3 - g("alpha_pp") + g("alpha_ppp")
    if denom == 0:
        raise ZeroDenominator("beta''' - alpha'' + alpha''' = 0")
    if b3 == 0:
        raise ZeroDenominator("beta''' = 0 leaves C undetermined")
    gamma_pp = -b3
    C = -(g("alpha") + g("alpha_p") + gamma_pp) / b3
    if prm.C is not None and prm.C != C:
        raise InconsistentAnsatz(f"C is computed in Case I ({C}), got {prm.C}")
    fixed = {
        "gamma_pp": gamma_pp, "sigma_ppp": gamma_pp, "delta_pp": b3,
        "beta_pp": Fraction(0), "sigma_pp": Fraction(0),
        "gamma_ppp": Fraction(0), "delta_ppp": Fraction(0),
        "beta_p": -g("beta") - g("alpha_pp"),
        "delta_p": g("alpha_ppp") - g("delta"),
        "gamma_p": -g("gamma") - C * g("alpha_ppp"),
        "sigma_p": C * g("alpha_pp") - g("sigma"),
    }
    for k in CASE_I_FREE:
        fixed.setdefault(k, g(k))
    out = AnsatzParams("I", _fill(prm, fixed), C)
    numer = sum(out.get(k) for k in ("alpha", "alpha_p", "gamma", "gamma_p", "gamma_pp", "sigma", "sigma_p"))
    assert -numer / denom == C
    if C == 0 and not _affine(out, "_p").is_zero():
        raise ZeroDenominator("C = 0 but e^(1)2_p is not identically zero (C e2_q = e2_p)")
    return out


def solve_case_II(free) -> AnsatzParams:
    """Complete a Case II ansatz (Omega1_{i pb} = C Omega1_{i qb}).

    Free: beta, gamma', A, A'. sigma' and delta default to beta and gamma'
    (the linear system forces both); if given they must agree. C is computed
    twice, as -gamma'/sigma' and -delta/beta, and the two must coincide.
    """
    prm = _as_params(free, "II")
    g = prm.get
    beta, gamma_p = g("beta"), g("gamma_p")
    sigma_p = prm.coeffs.get("sigma_p", beta)
    delta = prm.coeffs.get("delta", gamma_p)
    if sigma_p == 0:
        raise ZeroDenominator("sigma' = 0")
    if beta == 0:
        raise ZeroDenominator("beta = 0")
    C1, C2 = -gamma_p / sigma_p, -delta / beta
    if C1 != C2:
        raise InconsistentC(f"-gamma'/sigma' = {C1} but -delta/beta = {C2}")
    if prm.C is not None and prm.C != C1:
        raise InconsistentAnsatz(f"C = {prm.C} given, system fixes {C1}")
    if sigma_p != beta:
        raise InconsistentAnsatz(f"the coefficient system needs sigma' = beta, got {sigma_p} != {beta}")
    fixed = {
        "beta": beta, "gamma_p": gamma_p, "sigma_p": sigma_p, "delta": delta,
        "gamma": Fraction(0), "sigma": Fraction(0),
        "delta_p": Fraction(0), "beta_p": Fraction(0),
        "alpha": g("A_p"), "alpha_p": -g("A"),
        "A": g("A"), "A_p": g("A_p"),
    }
    for k in COEFF_NAMES:
        if k.endswith("_pp") or k.endswith("_ppp"):
            fixed[k] = Fraction(0)
    return AnsatzParams("II", _fill(prm, fixed), C1)


def solve(free) -> AnsatzParams:
    case = free.case if isinstance(free, AnsatzParams) else str(dict(free).get("case", "I")).upper()
    return solve_case_I(free) if case == "I" else solve_case_II(free)


def ansatz_entries(params: AnsatzParams) -> dict[str, PolyField]:
    """First-order vierbein components as affine forms in the formal metric variables."""
    if params.C is None:
        raise ValueError("parameters are not solved (C unset)")
    C = params.C
    if params.case == "I":
        e4q = _affine(params, "")
        e2p = _affine(params, "_p")
        e3qb = _affine(params, "_pp")
        e3pb = _affine(params, "_ppp")
        return {
            "e4_q": e4q, "e2_p": e2p, "e3_qb": e3qb, "e3_pb": e3pb,
            "e1_qb": e3qb * C, "e1_pb": e3pb * C, "e4_p": e4q * C,
            "e2_q": e2p / C if C else ZERO,
        }
    e1qb = _affine(params, "")
    e3qb = _affine(params, "_p")
    A, Ap = params.get("A"), params.get("A_p")
    return {
        "e1_qb": e1qb, "e3_qb": e3qb, "e1_pb": e1qb * C, "e3_pb": e3qb * C,
        "e4_p": (_c - _d * C) * A, "e2_p": (_a - _b * C) * A,
        "e4_q": (_c - _d * C) * Ap, "e2_q": (_a - _b * C) * Ap,
    }


def reduce_heavenly(f: PolyField) -> PolyField:
    """Normal form modulo Opp*Oqq - Opq*Oqp - 1 (no monomial keeps both Opp and Oqq)."""
    out = ZERO
    rel = _b * _c + 1
    for e, c in f.items():
        k = min(e[OPP], e[OQQ])
        rest = PolyField.monomial((e[0] - k, e[1], e[2], e[3] - k), c)
        out = out + (rest * rel**k if k else rest)
    return out


def first_order_constraint(entries: Mapping[str, PolyField]) -> PolyField:
    """The linearized heavenly equation for constant-coefficient potentials,
    written in the vierbein components (before imposing the relation det = 1)."""
    e = entries
    return (_a * e["e3_qb"] + _d * e["e1_pb"] - _b * e["e3_pb"] - _c * e["e1_qb"]
            + (e["e2_p"] + e["e4_q"]) * (_a * _d - _b * _c))


def case_constraint(params: AnsatzParams, reduce: bool = True) -> PolyField:
    """Case-specific constraint after the inter-component relations are used.

    Case I:  e4_q + e2_p + e3_qb (Opp - C Oqp) + e3_pb (C Oqq - Opq)
    Case II: e4_q + e2_p + e3_qb (Opp - C Opq) + e1_qb (C Oqq - Oqp)
    """
    e = ansatz_entries(params)
    C = params.C
    if params.case == "I":
        poly = e["e4_q"] + e["e2_p"] + e["e3_qb"] * (_a - _c * C) + e["e3_pb"] * (_d * C - _b)
    else:
        poly = e["e4_q"] + e["e2_p"] + e["e3_qb"] * (_a - _b * C) + e["e1_qb"] * (_d * C - _c)
    return reduce_heavenly(poly) if reduce else poly


def printed_case_constraint(params: AnsatzParams) -> PolyField:
    """The constraint exactly as typeset, with e1_pb in the last product.

    Kept for comparison only; with the ansatz substituted it does not reduce to
    zero in general (see ``case_constraint``).
    """
    e = ansatz_entries(params)
    C = params.C
    if params.case == "I":
        poly = e["e4_q"] + e["e2_p"] + e["e3_qb"] * (_a - _c * C) + e["e1_pb"] * (_d * C - _b)
    else:
        poly = e["e4_q"] + e["e2_p"] + e["e3_qb"] * (_a - _b * C) + e["e1_pb"] * (_d * C - _c)
    return reduce_heavenly(poly)


def vierbein_order1(params: AnsatzParams, omega: PolyField) -> VierbeinOrder:
    """Substitute Omega's metric entries into the solved ansatz."""
    g = KahlerMetricBlock.from_potential(omega)
    images = [g.pp, g.pq, g.qp, g.qq]
    return VierbeinOrder.from_components(
        {k: ratpoly.substitute(v, images) for k, v in ansatz_entries(params).items()})


# -- potential reconstruction -----------------------------------------

def _require_constant(e: VierbeinOrder, n: int):
    if not e.is_constant():
        raise NonConstantEntries(f"order-{n} vierbein entries depend on the coordinates")


def _first_line(e: VierbeinOrder, omega: PolyField) -> PolyField:
    c = e.component
    om_p, om_q = d(omega, P), d(omega, Q)
    p, q, pb, qb = ratpoly.p, ratpoly.q, ratpoly.pb, ratpoly.qb
    return ((c("e1_pb") * p + c("e3_pb") * q) * pb
            + (c("e1_qb") * p + c("e3_qb") * q) * qb
            + (c("e2_p") * p + c("e2_q") * q) * om_p
            + (c("e4_p") * p + c("e4_q") * q) * om_q)


def omega1_reconstruct(e1: VierbeinOrder, omega: PolyField) -> PolyField:
    """First-order potential correction from a constant first-order vierbein.

    (e1_pb p + e3_pb q) pb + (e1_qb p + e3_qb q) qb
      + (e2_p p + e2_q q) Omega_p + (e4_p p + e4_q q) Omega_q

    Its mixed second derivatives are e^(1)a_i e_jbar^b eta_ab + e_i^a
    e^(1)b_jbar eta_ab whenever Omega_{i jbar} is constant.
    """
    _require_constant(e1, 1)
    return _first_line(e1, omega)


def omega1_printed(e1: VierbeinOrder, omega: PolyField) -> PolyField:
    """The closed form as typeset, ending in (e2_p + e4_q) Omega.

    Differs from :func:`omega1_reconstruct` by e2_p (Omega - p Omega_p)
    + e4_q (Omega - q Omega_q); kept for comparison.
    """
    _require_constant(e1, 1)
    c = e1.component
    p, q, pb, qb = ratpoly.p, ratpoly.q, ratpoly.pb, ratpoly.qb
    return ((c("e1_pb") * p + c("e3_pb") * q) * pb + (c("e1_qb") * p + c("e3_qb") * q) * qb
            + c("e2_q") * d(omega, P) * q + c("e4_p") * d(omega, Q) * p
            + (c("e2_p") + c("e4_q")) * omega)


def omega_n_reconstruct(orders: Vierbein | Sequence[VierbeinOrder], omega: PolyField, n: int) -> PolyField:
    """Order-n potential correction; ``orders[0]`` is the classical frame (unused).

    Adds the bilinear convolution
    sum_{m=1}^{n-1} (e^(m)a_p p + e^(m)a_q q)(e^(n-m)b_pb pb + e^(n-m)b_qb qb) eta_ab.
    """
    seq = orders.orders if isinstance(orders, Vierbein) else tuple(orders)
    if n < 1:
        raise ValueError("n must be >= 1")
    if len(seq) <= n:
        raise ValueError(f"need vierbein orders up to {n}, have {len(seq) - 1}")
    for m in range(1, n + 1):
        _require_constant(seq[m], m)
    out = _first_line(seq[n], omega)
    x = (ratpoly.p, ratpoly.q, ratpoly.pb, ratpoly.qb)
    for m in range(1, n):
        left, right = seq[m].entries, seq[n - m].entries
        for a in range(4):
            for b in range(4):
                if not FLAT_METRIC[a][b]:
                    continue
                hol = left[a][P] * x[P] + left[a][Q] * x[Q]
                anti = right[b][PB] * x[PB] + right[b][QB] * x[QB]
                out = out + hol * anti
    return out


def mixed_hessian(f: PolyField) -> dict[str, PolyField]:
    return {"pp": d(f, P, PB), "pq": d(f, P, QB), "qp": d(f, Q, PB), "qq": d(f, Q, QB)}


def first_order_metric(e1: VierbeinOrder, omega: PolyField) -> dict[str, PolyField]:
    """The four relations Omega1_{i jbar} = e1_jbar-part + e1_i-part * Omega_{k jbar}."""
    g = KahlerMetricBlock.from_potential(omega)
    c = e1.component
    return {
        "qq": c("e3_qb") + c("e2_q") * g.pq + c("e4_q") * g.qq,
        "qp": c("e3_pb") + c("e2_q") * g.pp + c("e4_q") * g.qp,
        "pp": c("e1_pb") + c("e2_p") * g.pp + c("e4_p") * g.qp,
        "pq": c("e1_qb") + c("e2_p") * g.pq + c("e4_p") * g.qq,
    }
