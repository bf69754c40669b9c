"""Atiyah-Hitchin metric data, the rotational (Boyer-Finley) reduction and the
deformed line element in the Toda frame.

Floating point throughout: the elliptic integrals are transcendental.
``theta_angle`` is always the Euler angle; the deformation parameter is
``theta_val``.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, LengthError, SignError, StepError

AGM_TOL = 1e-16
SIGN_CONVENTION = {"beta": -1, "gamma": 1, "delta": 1}


@dataclass(frozen=True)
class EllipticModulus:
    k: float
    kprime_sq: float = field(init=False)

    def __post_init__(self):
        k = float(self.k)
        if not math.isfinite(k) or k < 0:
            raise DomainError(f"modulus must be finite and >= 0, got {self.k}")
        if k >= 1:
            raise DomainError(f"modulus must be < 1, got {self.k}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "kprime_sq", (1 - k) * (1 + k))


def _modulus(k) -> EllipticModulus:
    return k if isinstance(k, EllipticModulus) else EllipticModulus(k)


def _agm(k: EllipticModulus) -> tuple[float, float]:
    """Return (AGM(1, k'), sum_n 2^(n-1) c_n^2) with c_0 = k."""
    a, b = 1.0, math.sqrt(k.kprime_sq)
    s = 0.5 * k.k * k.k
    pw = 0.5
    for _ in range(64):
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        pw *= 2
        s += pw * c * c
        if abs(c) <= AGM_TOL * a:
            break
    return a, s


def elliptic_K(k) -> float:
    """Complete elliptic integral of the first kind, modulus k."""
    m, _ = _agm(_modulus(k))
    return math.pi / (2 * m)


def elliptic_E(k) -> float:
    """Complete elliptic integral of the second kind, modulus k."""
    m, s = _agm(_modulus(k))
    return math.pi / (2 * m) * (1 - s)


@dataclass(frozen=True)
class AHPoint:
    k: EllipticModulus
    theta_angle: float
    psi: float

    def __post_init__(self):
        th, ps = float(self.theta_angle), float(self.psi)
        if not (math.isfinite(th) and math.isfinite(ps)):
            raise ValueError("angles must be finite")
        th = math.fmod(th, 2 * math.pi)
        if th < 0:
            th += 2 * math.pi
        if th > math.pi:
            # reflected Euler angle: same sigma-form data with psi shifted by pi
            th, ps = 2 * math.pi - th, ps + math.pi
        ps = math.fmod(ps, 2 * math.pi)
        if ps < 0:
            ps += 2 * math.pi
        if ps >= 2 * math.pi:
            ps = 0.0
        object.__setattr__(self, "k", _modulus(self.k))
        object.__setattr__(self, "theta_angle", th)
        object.__setattr__(self, "psi", ps)


@dataclass(frozen=True)
class AHData:
    k: float
    K: float
    E: float
    G: float
    u: float
    bg: float
    gd: float
    db: float
    b2: float
    g2: float
    d2: float
    beta: float
    gamma: float
    delta: float
    theta_angle: float | None = None
    psi: float | None = None
    V_inv: float | None = None
    omega_theta: float | None = None
    omega_psi: float | None = None
    gamma_ij: tuple | None = None
    Omega: float | None = None
    J: float | None = None
    signs: Mapping[str, int] = field(default_factory=lambda: dict(SIGN_CONVENTION))

    def row(self) -> dict:
        """Flat record for lattice export."""
        g = self.gamma_ij or ((math.nan,) * 3,) * 3
        return {
            "k": self.k, "theta_angle": self.theta_angle, "psi": self.psi,
            "K": self.K, "E": self.E, "u": self.u,
            "bg": self.bg, "gd": self.gd, "db": self.db, "V_inv": self.V_inv,
            "gamma_k2k2": g[0][0], "gamma_thth": g[1][1], "gamma_thpsi": g[1][2], "gamma_psipsi": g[2][2],
            "Omega": self.Omega, "J": self.J,
        }


def ah_coeffs(k) -> AHData:
    """K, E, G, u and the pairwise products bg, gd, db with their squares."""
    m = _modulus(k)
    K, E = elliptic_K(m), elliptic_E(m)
    kp2 = m.kprime_sq
    G = E - kp2 * K
    u = G / K
    K2 = K * K
    bg, gd, db = -K2 * (kp2 + u), K2 * (kp2 - u), -K2 * u
    if bg == 0 or gd == 0 or db == 0:
        raise SignError(f"degenerate pair product at k={m.k}: bg={bg}, gd={gd}, db={db}")
    b2, g2, d2 = bg * db / gd, bg * gd / db, gd * db / bg
    bad = [n for n, v in (("b2", b2), ("g2", g2), ("d2", d2)) if not v > 0]
    if bad:
        raise SignError(f"{', '.join(bad)} non-positive at k={m.k} (u={u}, k'^2={kp2})")
    s = SIGN_CONVENTION
    return AHData(m.k, K, E, G, u, bg, gd, db, b2, g2, d2,
                  s["beta"] * math.sqrt(b2), s["gamma"] * math.sqrt(g2), s["delta"] * math.sqrt(d2))


def ah_metric(point: AHPoint) -> AHData:
    """1/V, omega, gamma_ij in (k^2, theta, psi), Omega and J at ``point``."""
    c = ah_coeffs(point.k)
    th, ps = point.theta_angle, point.psi
    st, ct, sp, cp = math.sin(th), math.cos(th), math.sin(ps), math.cos(ps)
    st2, ct2, sp2, cp2 = st * st, ct * ct, sp * sp, cp * cp
    b2, g2, d2 = c.b2, c.g2, c.d2
    V_inv = 0.25 * (b2 * st2 * cp2 + g2 * st2 * sp2 + d2 * ct2)
    omega_theta = V_inv * (g2 - b2) * sp * cp * st
    omega_psi = V_inv * d2 * ct
    k2 = c.k * c.k
    scale = 4 * k2 * point.k.kprime_sq * c.K * c.K
    g_kk = b2 * g2 * d2 * V_inv / (scale * scale)
    g_tt = (b2 * g2 * st2 + d2 * ct2 * (b2 * sp2 + g2 * cp2)) / 16
    g_tp = -(d2 * (g2 - b2) * ct * st * cp * sp) / 16
    g_pp = d2 * st2 * (b2 * cp2 + g2 * sp2) / 16
    gamma_ij = ((g_kk, 0.0, 0.0), (0.0, g_tt, g_tp), (0.0, g_tp, g_pp))
    total = c.bg + c.gd + c.db
    J = (total - c.gd * st2 * cp2 - c.db * st2 * sp2 - c.bg * ct2) / 8
    return replace(c, theta_angle=th, psi=ps, V_inv=V_inv, omega_theta=omega_theta,
                   omega_psi=omega_psi, gamma_ij=gamma_ij, Omega=total / 4 - J, J=J)


def quotient_identities(c: AHData) -> dict[str, float]:
    """Relative errors of b2*gd = bg*db, g2*db = bg*gd, d2*bg = gd*db."""
    def rel(x, y):
        return abs(x - y) / max(abs(x), abs(y), 1e-300)
    return {"b2": rel(c.b2 * c.gd, c.bg * c.db),
            "g2": rel(c.g2 * c.db, c.bg * c.gd),
            "d2": rel(c.d2 * c.bg, c.gd * c.db)}


def small_k_limits(k: float) -> dict[str, float]:
    """Leading small-modulus behaviour: u ~ k^2/2, db ~ -pi^2 k^2/8, bg ~ -pi^2/4."""
    return {"u": k * k / 2, "db": -math.pi**2 * k * k / 8, "bg": -math.pi**2 / 4}


def ah_sweep(ks: Sequence[float], thetas: Sequence[float], psis: Sequence[float]) -> list[AHData]:
    return [ah_metric(AHPoint(EllipticModulus(k), th, ps)) for k in ks for th in thetas for ps in psis]


def default_lattice(n_k: int = 10, n_theta: int = 8, n_psi: int = 8,
                    k_range: tuple[float, float] = (0.2, 0.8)):
    ks = np.linspace(*k_range, n_k)
    thetas = np.linspace(0, math.pi, n_theta)
    psis = np.linspace(0, 2 * math.pi, n_psi, endpoint=False)
    return [float(x) for x in ks], [float(x) for x in thetas], [float(x) for x in psis]


def _g17(x):
    return "" if x is None else format(x, ".17g")


def write_sweep(rows: Sequence[AHData], path: str | Path, fmt: str = "csv"):
    records = [r.row() for r in rows]
    path = Path(path)
    if fmt == "csv":
        with path.open("w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(records[0]) if records else [])
            w.writeheader()
            for rec in records:
                w.writerow({k: _g17(v) for k, v in rec.items()})
    elif fmt == "json":
        meta = {"sign_convention": SIGN_CONVENTION, "digits": 17}
        path.write_text(json.dumps({"meta": meta, "rows": [
            {k: (None if v is None else float(_g17(v))) for k, v in rec.items()} for rec in records]}, indent=1))
    else:
        raise ValueError(f"unknown format {fmt!r}")


# -- rotational reduction -------------------------------------------------

Evaluator = Callable[[float, complex, complex], float]
DERIV_KEYS = ("r", "rr", "qqbar", "rq", "rqbar")


@dataclass(frozen=True)
class RotationalField:
    """Omega(r, q, qbar), optionally with analytic derivatives.

    ``derivs`` maps each of r, rr, qqbar, rq, rqbar to a callable with the
    same signature as ``value``.
    """
    value: Evaluator
    derivs: Mapping[str, Evaluator] | None = None
    name: str = ""

    def __post_init__(self):
        if self.derivs is not None:
            missing = set(DERIV_KEYS) - set(self.derivs)
            if missing:
                raise ValueError(f"analytic derivatives missing {sorted(missing)}")


@dataclass(frozen=True)
class Derivatives:
    r: complex
    rr: complex
    qqbar: complex
    rq: complex
    rqbar: complex
    h: float | None  # None for analytic values


def derivatives(f: RotationalField, sample, h: float | None = None) -> Derivatives:
    """Analytic derivatives when available and h is None, else central differences.

    q = x + iy is varied through x and y with qbar = conj(q), using
    d_q = (d_x - i d_y)/2 and d_q d_qbar = (d_xx + d_yy)/4.
    """
    r, q, qbar = sample
    if h is None and f.derivs is not None:
        return Derivatives(*(f.derivs[k](r, q, qbar) for k in DERIV_KEYS), None)
    if h is None:
        raise StepError("no analytic derivatives; a finite-difference step h is required")
    if not h > 0:
        raise StepError(f"finite-difference step must be > 0, got {h}")
    q = complex(q)

    def F(dr=0.0, dx=0.0, dy=0.0):
        z = q + complex(dx, dy)
        return f.value(r + dr, z, z.conjugate())

    f0 = F()
    Fr = (F(h) - F(-h)) / (2 * h)
    Frr = (F(h) - 2 * f0 + F(-h)) / (h * h)
    Fxx = (F(dx=h) - 2 * f0 + F(dx=-h)) / (h * h)
    Fyy = (F(dy=h) - 2 * f0 + F(dy=-h)) / (h * h)
    Frx = (F(h, h) - F(h, -h) - F(-h, h) + F(-h, -h)) / (4 * h * h)
    Fry = (F(h, 0, h) - F(h, 0, -h) - F(-h, 0, h) + F(-h, 0, -h)) / (4 * h * h)
    return Derivatives(Fr, Frr, (Fxx + Fyy) / 4, (Frx - 1j * Fry) / 2, (Frx + 1j * Fry) / 2, h)


def rotational_residual(f: RotationalField, sample, h: float | None = None) -> float:
    """(r Omega_r)_r Omega_{q qbar} - r Omega_{rq} Omega_{r qbar} - 1 at (r, q, qbar)."""
    r = sample[0]
    if not r > 0:
        raise ValueError(f"r must be > 0, got {r}")
    D = derivatives(f, sample, h)
    val = (D.r + r * D.rr) * D.qqbar - r * D.rq * D.rqbar - 1
    val = complex(val)
    if abs(val.imag) > 1e-9 * max(1.0, abs(val.real)):
        raise ValueError(f"residual has imaginary part {val.imag}; field is not real")
    return val.real


def flat_field(a=1) -> RotationalField:
    """a r + q qbar / a with exact analytic derivatives."""
    return RotationalField(
        lambda r, q, qb: a * r + (q * qb).real / a,
        {"r": lambda r, q, qb: a, "rr": lambda r, q, qb: 0,
         "qqbar": lambda r, q, qb: 1 / a,
         "rq": lambda r, q, qb: 0, "rqbar": lambda r, q, qb: 0},
        f"{a} r + q qbar / {a}",
    )


def log_field() -> RotationalField:
    """r + ln r + q qbar, another exact solution ((r Omega_r)_r = 1)."""
    return RotationalField(
        lambda r, q, qb: r + math.log(r) + (q * qb).real,
        {"r": lambda r, q, qb: 1 + 1 / r, "rr": lambda r, q, qb: -1 / r**2,
         "qqbar": lambda r, q, qb: 1, "rq": lambda r, q, qb: 0, "rqbar": lambda r, q, qb: 0},
        "r + ln r + q qbar",
    )


def toda_r_of_J(f: RotationalField, J0: float, q: complex, bracket=(1e-12, 1e6), h: float = 1e-5) -> float:
    """Solve J(r) = r Omega_r(r, q, qbar) = J0 for r at fixed q (local 1D root)."""
    qb = complex(q).conjugate()

    def J(r):
        if f.derivs is not None:
            omr = f.derivs["r"](r, q, qb)
        else:
            step = h * r  # relative step keeps r - step > 0
            omr = (f.value(r + step, q, qb) - f.value(r - step, q, qb)) / (2 * step)
        return r * float(np.real(omr)) - J0

    return brentq(J, *bracket, xtol=1e-15, rtol=4 * np.finfo(float).eps)


# -- deformed line element ---------------------------------------------

def _need(seq, n, what):
    if len(seq) < n:
        raise LengthError(f"{what} needs {n} entries, got {len(seq)}")


def deformed_qqbar_order(n: int, rJ: float, Jr_list: Sequence[float], Oqq_list: Sequence[float],
                         rq_rqbar_over_r: float, Oqq0: float) -> float:
    """Omega^(n)_{q qbar} from the recursion in the Toda frame.

    ``Jr_list[i]`` is J_r^(i+1) (orders 1..n); ``Oqq_list[i]`` is
    Omega^(i+1)_{q qbar} (orders 1..n-1).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    _need(Jr_list, n, "Jr_list")
    _need(Oqq_list, n - 1, "Oqq_list")
    out = rJ * Jr_list[n - 1] * (Oqq0 - 2 * rJ)
    for m in range(1, n):
        s = n - m
        out += rJ * Jr_list[s - 1] * (Jr_list[m - 1] * rq_rqbar_over_r - Oqq_list[m - 1])
    return out


@dataclass(frozen=True)
class TodaOrders:
    """Pointwise Toda-frame inputs: r_J, J_r^(1..N), Omega^(1..N)_{q qbar}, r^-1 r_q r_qbar."""
    rJ: float
    Jr: Sequence[float]
    Oqq: Sequence[float]
    rq_rqbar_over_r: float



@dataclass(frozen=True)
class LineElement:
    first: float
    second: float

    @property
    def discrepancy(self) -> float:
        return self.second - self.first


def _conv(o: TodaOrders, n: int, sign: int) -> float:
    X = o.rq_rqbar_over_r
    return sum(o.rJ * o.Jr[n - m - 1] * (o.Jr[m - 1] * X + sign * o.Oqq[m - 1]) for m in range(1, n))


def deformed_line_element(orders: TodaOrders, ds2: float, dq_dqbar: float, dJ2: float,
                          gamma_dx2: float, theta_val: float, N: int) -> LineElement:
    """Both displayed forms of the deformed line element, truncated at theta^N.

    J_r^(0) r_J = 1, so the n = 0 term is ds2 itself. The first form carries
    [-2 r_J^2 J_r^(n) + convolution with -Omega^(m)] dq dqbar; the second the
    convolution with +Omega^(m) times (gamma_ij dx dx - dJ^2)/4.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    _need(orders.Jr, N, "Jr")
    _need(orders.Oqq, max(N - 1, 0), "Oqq")
    first = second = ds2
    tq = (gamma_dx2 - dJ2) / 4
    for n in range(1, N + 1):
        tn = theta_val ** n
        base = tn * orders.Jr[n - 1] * orders.rJ * ds2
        first += base + tn * (-2 * orders.rJ * orders.rJ * orders.Jr[n - 1] + _conv(orders, n, -1)) * dq_dqbar
        second += base + tn * _conv(orders, n, +1) * tq
    return LineElement(first, second)
