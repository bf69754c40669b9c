"""Acceptance criteria, one test each, at their stated sizes and tolerances.

Run directly (``python tests/test_acceptance.py``) for a one-line-per-criterion
summary; under pytest the same lines appear in the terminal summary.
"""
import math
import random
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from scipy.integrate import quad

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE  # noqa: E402
from moyal_kahler import ah, frame, heavenly, moyal, ratpoly  # noqa: E402
from moyal_kahler.cli import fixture_text  # noqa: E402
from moyal_kahler.errors import ZeroDenominator  # noqa: E402
from moyal_kahler.moyal import ThetaSeries  # noqa: E402
from moyal_kahler.ratpoly import P, PB, Q, QB, ONE, ZERO, d, p, pb, q, qb  # noqa: E402

SEED = 20240601
FIXTURES = {n: ratpoly.parse(fixture_text(f"{n}.poly")) for n in ("flat", "flat-plus-holo", "scaled")}


def rng(k):
    return random.Random(SEED + k)


def rand_poly(r, deg, terms=5):
    return ratpoly.random_poly(r, max_degree=deg, max_terms=terms)


def c1_classical_limit():
    r = rng(1)
    for i in range(200):
        f, g = rand_poly(r, 5), rand_poly(r, 5)
        if moyal.moyal_bracket(f, g, 4).real(0) != moyal.poisson_bracket(f, g):
            return False, f"pair {i} differs: f={f}, g={g}"
    return True, "200/200 pairs exact"


def c2_algebra_laws():
    r = rng(2)
    N = 8
    S = lambda x: ThetaSeries.scalar(x)
    for i in range(100):
        f, g, h = rand_poly(r, 4), rand_poly(r, 4), rand_poly(r, 4)
        c = Fraction(r.randint(-5, 5), r.randint(1, 4))
        fg, gf = moyal.moyal_bracket(f, g, N), moyal.moyal_bracket(g, f, N)
        if not fg.exact or not (fg + gf).is_zero():
            return False, f"antisymmetry, triple {i}"
        lhs = moyal.moyal_bracket(f * c + h, g, N)
        if not lhs.same_coeffs(fg.scale(c) + moyal.moyal_bracket(h, g, N)):
            return False, f"bilinearity, triple {i}"
        jac = ThetaSeries.scalar(ZERO, N)
        for a, b, e in ((f, g, h), (g, h, f), (h, f, g)):
            inner = moyal.moyal_bracket_series(S(b), S(e), N)
            outer = moyal.moyal_bracket_series(S(a), inner, N)
            if not (inner.exact and outer.exact):
                return False, f"Jacobi series not terminated at N={N}, triple {i}"
            jac = jac + outer
        if not jac.is_zero():
            return False, f"Jacobi, triple {i}: {jac}"
    return True, "100/100 triples exact (antisymmetry, bilinearity, Jacobi)"


def _rand_series(r, N=2):
    return heavenly.potential_series(*[rand_poly(r, 4, 8) for _ in range(N + 1)], order=N)


def c3_wedge_identity():
    r = rng(3)
    N = 2
    failures = []
    for i in range(25):
        oh = _rand_series(r, N)
        w = heavenly.wedge_self(heavenly.build_two_form(oh), N)
        lam2 = w.at(2) or ThetaSeries.scalar(ZERO, N)
        others = [k for k in w.value if k != 2]
        target = heavenly.deformed_bracket(oh, N) - ThetaSeries.scalar(ONE, N)
        diff = lam2 - target
        if others or not diff.is_zero():
            orders = sorted({n for n in range(N + 1) if diff.coeff(n) != (ZERO, ZERO)})
            om0 = oh.coeff(0)[0]
            s3 = ratpoly.bidifferential(d(om0, P), d(om0, Q), 3)
            failures.append((i, orders, diff.coeff(2)[0], diff.coeff(2) == (s3 * Fraction(-1, 12), ZERO)))
    if failures:
        i, orders, wit, _ = failures[0]
        where = sorted({o for f in failures for o in f[1]})
        structured = all(f[3] for f in failures)
        return False, (f"{len(failures)}/25 draws differ, at theta^{where} only; first draw {i}: "
                       f"theta^2 difference {wit}; every difference equals -S/12 "
                       f"(S = third-order pb/qb contraction of Omega_p, Omega_q): {structured}")
    return True, "25/25 draws exact"


def c4_closedness():
    r = rng(4)
    for name, om in FIXTURES.items():
        if not heavenly.is_closed(heavenly.build_two_form(heavenly.potential_series(om, order=2))):
            return False, f"fixture {name}"
    for i in range(25):
        if not heavenly.is_closed(heavenly.build_two_form(_rand_series(r))):
            return False, f"seeded potential {i}"
    return True, "3 fixtures + 25 seeded potentials closed"


def c5_heavenly_fixtures():
    res = {n: heavenly.ma_residual(om) for n, om in FIXTURES.items()}
    ok = res["flat"].is_zero() and res["flat-plus-holo"].is_zero() and res["scaled"] == 1
    return ok, ", ".join(f"{n}: {v}" for n, v in res.items())


def _draw_I(r):
    return {k: Fraction(r.randint(-4, 4), r.randint(1, 3)) for k in frame.CASE_I_FREE}


def _draw_II(r):
    return {"beta": Fraction(r.randint(-3, 3), r.randint(1, 3)), "gamma_p": Fraction(r.randint(-4, 4), r.randint(1, 3)),
            "A": Fraction(r.randint(-3, 3)), "A_p": Fraction(r.randint(-3, 3))}


def c6_solvers():
    msgs = []
    for case, solver, draw in (("I", frame.solve_case_I, _draw_I), ("II", frame.solve_case_II, _draw_II)):
        r = rng(60 + len(msgs))
        solved = skipped = 0
        for i in range(50):
            try:
                s = solver(draw(r))
            except ZeroDenominator:
                skipped += 1
                continue
            if not frame.case_constraint(s).is_zero():
                return False, f"case {case} draw {i}: {frame.case_constraint(s)}"
            solved += 1
        msgs.append(f"case {case}: {solved} zero, {skipped} ZeroDenominator")
    return True, "; ".join(msgs)


def _heavenly_block(r):
    while True:
        a, b, c = (Fraction(r.randint(-4, 4), r.randint(1, 3)) for _ in range(3))
        if a:
            break
    hol = ratpoly.substitute(rand_poly(r, 4, 3), [p, q, ZERO, ZERO])
    anti = ratpoly.substitute(rand_poly(r, 4, 3), [ZERO, ZERO, pb, qb])
    return a * p * pb + b * p * qb + c * q * pb + (1 + b * c) / a * q * qb + hol + anti


def c7_pipeline():
    counts = {}
    for case, solver, draw in (("I", frame.solve_case_I, _draw_I), ("II", frame.solve_case_II, _draw_II)):
        r = rng(70 + len(counts))
        done = 0
        while done < 20:
            try:
                s = solver(draw(r))
            except ZeroDenominator:
                continue
            om = _heavenly_block(r) if done else FIXTURES["flat"]
            e1 = frame.vierbein_order1(s, om)
            o1 = frame.omega1_reconstruct(e1, om)
            dc = heavenly.det_condition_series(heavenly.potential_series(om, o1), 1)
            fo = heavenly.first_order_residual(om, o1)
            if not (dc.star.is_zero() and dc.ordinary.is_zero() and fo.is_zero()):
                return False, f"case {case}: det {dc.star}, first-order {fo}"
            done += 1
        counts[case] = done
    return True, f"case I {counts['I']}, case II {counts['II']} potentials exact at theta^0, theta^1"


def c8_hessian_relations():
    r = rng(8)
    for i in range(60):
        e1 = frame.VierbeinOrder.from_components(
            {k: Fraction(r.randint(-5, 5), r.randint(1, 4)) for k in frame.COMPONENTS})
        a, b, c, dd = (Fraction(r.randint(-5, 5), r.randint(1, 3)) for _ in range(4))
        om = (a * p * pb + b * p * qb + c * q * pb + dd * q * qb
              + ratpoly.substitute(rand_poly(r, 5, 4), [p, q, ZERO, ZERO])
              + ratpoly.substitute(rand_poly(r, 5, 4), [ZERO, ZERO, pb, qb]))
        o1 = frame.omega1_reconstruct(e1, om)
        if frame.mixed_hessian(o1) != frame.first_order_metric(e1, om):
            return False, f"draw {i}"
    return True, "60/60 constant vierbeins reproduce all four mixed-Hessian relations"


def c9_elliptic():
    k0 = max(abs(ah.elliptic_K(0) - math.pi / 2), abs(ah.elliptic_E(0) - math.pi / 2))
    grid = np.linspace(0.01, 0.99, 50)
    agm = leg = 0.0
    for k in map(float, grid):
        Kq = quad(lambda t: 1 / math.sqrt(1 - (k * math.sin(t)) ** 2), 0, math.pi / 2,
                  epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        Eq = quad(lambda t: math.sqrt(1 - (k * math.sin(t)) ** 2), 0, math.pi / 2,
                  epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        agm = max(agm, abs(ah.elliptic_K(k) - Kq), abs(ah.elliptic_E(k) - Eq))
        kp = math.sqrt((1 - k) * (1 + k))
        K, E, K2, E2 = ah.elliptic_K(k), ah.elliptic_E(k), ah.elliptic_K(kp), ah.elliptic_E(kp)
        leg = max(leg, abs(E * K2 + E2 * K - K * K2 - math.pi / 2))
    ok = k0 < 1e-14 and agm < 1e-12 and leg < 1e-12
    return ok, f"k=0 err {k0:.1e}, AGM-quad max {agm:.1e}, Legendre max {leg:.1e}"


def c10_ah_sanity():
    ks, ths, pss = ah.default_lattice(10, 8, 8, (0.2, 0.8))
    rows = ah.ah_sweep(ks, ths, pss)
    vmin = min(m.V_inv for m in rows)
    eig = min(float(np.linalg.eigvalsh(np.array(m.gamma_ij)).min()) for m in rows)
    quot = max(max(ah.quotient_identities(m).values()) for m in rows)
    k = 1e-4
    c = ah.ah_coeffs(k)
    lim = ah.small_k_limits(k)
    du, ddb = abs(c.u - lim["u"]), abs(c.db - lim["db"])
    ok = vmin > 0 and eig >= -1e-10 and quot < 1e-12 and du < 1e-8 and ddb < 1e-8
    return ok, (f"{len(rows)} points: min V_inv {vmin:.3g}, min eig {eig:.1e}, quotient {quot:.1e}; "
                f"k=1e-4 |u-k^2/2| {du:.1e}, |db+pi^2 k^2/8| {ddb:.1e} (|db| itself {abs(c.db):.2e})")


def c11_rotational():
    r = rng(11)
    flat = ah.flat_field()
    worst = 0.0
    for _ in range(50):
        z = complex(r.uniform(-2, 2), r.uniform(-2, 2))
        worst = max(worst, abs(ah.rotational_residual(flat, (r.uniform(0.1, 3), z, z.conjugate()))))
    f = ah.log_field()
    ratios = []
    for _ in range(5):
        z = complex(r.uniform(-1, 1), r.uniform(-1, 1))
        s = (r.uniform(0.5, 2), z, z.conjugate())
        e1 = abs(ah.rotational_residual(f, s, 1e-2))
        e2 = abs(ah.rotational_residual(f, s, 5e-3))
        ratios.append(e1 / e2)
    ok = worst == 0.0 and all(3.5 <= x <= 4.5 for x in ratios)
    return ok, f"r+qqbar analytic max |res| {worst}; FD ratios on r+ln r+qqbar {[round(x, 4) for x in ratios]}"


def c12_line_element():
    r = rng(12)
    theta0 = True
    worst = 0.0
    for _ in range(100):
        rJ, c = r.uniform(0.1, 3), r.uniform(-2, 2)
        ds2, dq, dJ2, rr = r.uniform(0, 5), r.uniform(0, 2), r.uniform(0, 2), r.uniform(0.1, 3)
        th = r.uniform(-0.5, 0.5)
        o = ah.TodaOrders(rJ, [c], [], r.uniform(0, 1))
        z = ah.deformed_line_element(o, ds2, dq, dJ2, dJ2 + 4 * rr * dq, 0.0, 1)
        theta0 &= z.first == ds2 and z.second == ds2
        le = ah.deformed_line_element(o, ds2, dq, dJ2, dJ2 + 4 * rr * dq, th, 1)
        closed = (1 + th * c * rJ) * ds2 - 2 * th * c * rJ * rJ * dq
        worst = max(worst, abs(le.first - closed))
    ex = [ah.deformed_qqbar_order(1, 1.3, [0.0], [], 0.4, 2.0) == 0.0,
          ah.deformed_qqbar_order(1, 1.0, [1.0], [], 0.0, 3.0) == 1.0,
          ah.deformed_qqbar_order(2, 2.0, [0.0, 1.5], [0.0], 0.7, 5.0) == 2.0 * 1.5 * (5.0 - 2 * 2.0)]
    ok = theta0 and worst <= 1e-12 and all(ex)
    return ok, f"theta=0 exact: {theta0}; n=1 closed-form max err {worst:.1e}; recursion examples {ex}"


CRITERIA = {
    1: ("classical limit", c1_classical_limit),
    2: ("Moyal algebra laws", c2_algebra_laws),
    3: ("wedge identity", c3_wedge_identity),
    4: ("closedness", c4_closedness),
    5: ("heavenly fixtures", c5_heavenly_fixtures),
    6: ("Case I / II solvers", c6_solvers),
    7: ("first-order pipeline", c7_pipeline),
    8: ("reconstruction Hessian check", c8_hessian_relations),
    9: ("elliptic integrals", c9_elliptic),
    10: ("AH metric sanity", c10_ah_sanity),
    11: ("rotational reduction", c11_rotational),
    12: ("deformed line element", c12_line_element),
}


def evaluate(n):
    title, fn = CRITERIA[n]
    ok, detail = fn()
    ACCEPTANCE[n] = (ok, title, detail)
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {title} -- {detail}")
    return ok, detail


@pytest.mark.parametrize("n", sorted(CRITERIA), ids=lambda n: f"{n:02d}-{CRITERIA[n][0].replace(' ', '-')}")
def test_criterion(n):
    ok, detail = evaluate(n)
    assert ok, detail


if __name__ == "__main__":
    results = [evaluate(n)[0] for n in sorted(CRITERIA)]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
