"""Command-line driver: seeded verification suites with JSON reports.

Exit status is 0 when every check passes, 1 when any fails and 2 on a
configuration error.
"""
from __future__ import annotations

import argparse
import json
import math
import random
import sys
import time
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable

from . import __version__, ah, frame, heavenly, moyal, ratpoly
from .errors import ConfigError, ParseError
from .moyal import ThetaSeries
from .ratpoly import PolyField

COMMANDS = ("verify-brackets", "verify-heavenly", "solve-first-order",
            "verify-pipeline", "ah-sweep", "ah-deformed")
FIXTURES = ("flat", "flat-plus-holo", "scaled")
SCHEMA = 1


@dataclass
class RunConfig:
    command: str
    order: int = 2
    params: str | None = None
    potential: str = "flat"
    seed: int = 0
    out: str | None = None
    format: str = "json"
    table: str | None = None
    count: int = 25
    max_degree: int = 4
    max_terms: int = 5
    coeff_bound: int = 5
    k_min: float = 0.2
    k_max: float = 0.8
    n_k: int = 10

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.order < 0:
            raise ConfigError("order must be >= 0")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if self.count < 1 or self.n_k < 1:
            raise ConfigError("count and n-k must be >= 1")
        if not 0 < self.k_min <= self.k_max < 1:
            raise ConfigError("need 0 < k-min <= k-max < 1")


@dataclass
class Check:
    name: str
    status: str  # pass | fail | info (info never affects the exit code)
    witness: object = None
    tolerance: float | None = None


@dataclass
class Report:
    command: str
    config: dict
    checks: list[Check] = field(default_factory=list)
    artifacts: dict = field(default_factory=dict)
    version: str = __version__
    wall_time: float = 0.0
    schema: int = SCHEMA

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def to_json(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out

    def add(self, name, ok: bool, witness=None, tolerance=None):
        self.checks.append(Check(name, "pass" if ok else "fail", _plain(witness), tolerance))

    def info(self, name, witness):
        self.checks.append(Check(name, "info", _plain(witness)))


def _plain(x):
    if isinstance(x, PolyField):
        return ratpoly.to_str(x)
    if isinstance(x, ThetaSeries):
        return x.to_json()
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


# -- inputs ---------------------------------------------------------------

def fixture_text(name: str) -> str:
    return resources.files("moyal_kahler").joinpath("fixtures", name).read_text()


def load_potential(source: str) -> PolyField:
    """Named fixture, a file holding a polynomial, or a polynomial literal."""
    try:
        if source in FIXTURES:
            return ratpoly.parse(fixture_text(f"{source}.poly"))
        path = Path(source)
        if path.is_file():
            return ratpoly.parse(path.read_text())
        return ratpoly.parse(source)
    except (ParseError, OSError) as exc:
        raise ConfigError(f"cannot resolve potential {source!r}: {exc}") from exc


def load_params(source: str | None) -> frame.AnsatzParams:
    if source is None:
        raise ConfigError("--params is required for this command")
    try:
        path = Path(source)
        if not path.is_file():
            name = source if source.endswith(".json") else f"{source}.json"
            return frame.AnsatzParams.from_json(json.loads(fixture_text(name)))
        return frame.AnsatzParams.load(path)
    except (OSError, ValueError, KeyError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot load parameters {source!r}: {exc}") from exc


def _rand(cfg: RunConfig, rng: random.Random) -> PolyField:
    return ratpoly.random_poly(rng, cfg.max_degree, cfg.max_terms, cfg.coeff_bound)


# -- suites ------------------------------------------------------------

def _verify_brackets(cfg: RunConfig, rep: Report):
    rng = random.Random(cfg.seed)
    N = cfg.order
    bad = {"classical": None, "antisymmetry": None, "jacobi": None, "even": None}
    for _ in range(cfg.count):
        f, g, h = _rand(cfg, rng), _rand(cfg, rng), _rand(cfg, rng)
        fg = moyal.moyal_bracket(f, g, N)
        if bad["classical"] is None and fg.real(0) != moyal.poisson_bracket(f, g):
            bad["classical"] = [str(f), str(g)]
        if bad["antisymmetry"] is None and not (fg + moyal.moyal_bracket(g, f, N)).is_zero():
            bad["antisymmetry"] = [str(f), str(g)]
        if bad["even"] is None and not moyal.only_even_orders(fg):
            bad["even"] = [str(f), str(g)]
        if bad["jacobi"] is None:
            j = ThetaSeries.scalar(ratpoly.ZERO, N)
            for a, b, c in ((f, g, h), (g, h, f), (h, f, g)):
                inner = moyal.moyal_bracket_series(ThetaSeries.scalar(b), ThetaSeries.scalar(c), N)
                j = j + moyal.moyal_bracket_series(ThetaSeries.scalar(a), inner, N)
            if not j.is_zero():
                bad["jacobi"] = [str(f), str(g), str(h)]
    for name, w in bad.items():
        rep.add(name, w is None, w, 0)


def _verify_heavenly(cfg: RunConfig, rep: Report):
    om = load_potential(cfg.potential)
    res = heavenly.ma_residual(om)
    rep.add("monge-ampere", res.is_zero(), res, 0)
    oh = heavenly.potential_series(om, order=cfg.order)
    for r in range(cfg.order + 1):
        rr = heavenly.deformed_residual(oh, r)
        rep.add(f"deformed-residual-{r}", rr.is_zero(), rr, 0)
    w = heavenly.build_two_form(oh)
    rep.add("two-form-closed", heavenly.is_closed(w), None, 0)
    lam2 = heavenly.wedge_self(w, cfg.order).at(2) or ThetaSeries.scalar(ratpoly.ZERO, cfg.order)
    target = heavenly.deformed_bracket(oh, cfg.order) - ThetaSeries.scalar(ratpoly.ONE, cfg.order)
    diff = lam2 - target
    rep.add("wedge-identity", diff.is_zero(), diff, 0)
    rep.info("hermiticity", bool(heavenly.hermiticity_check(om)))


def _solve(cfg: RunConfig, rep: Report):
    prm = load_params(cfg.params)
    try:
        solved = frame.solve(prm)
    except (ZeroDivisionError, ValueError) as exc:
        rep.add(type(exc).__name__, False, str(exc))
        return None
    rep.artifacts["params"] = solved.to_json()
    poly = frame.case_constraint(solved)
    rep.add(f"case-{solved.case}-constraint", poly.is_zero(), ratpoly.to_str(poly, frame.METRIC_NAMES), 0)
    lin = frame.reduce_heavenly(frame.first_order_constraint(frame.ansatz_entries(solved)))
    rep.add("linearized-heavenly", lin.is_zero(), ratpoly.to_str(lin, frame.METRIC_NAMES), 0)
    return solved


def _solve_first_order(cfg: RunConfig, rep: Report):
    _solve(cfg, rep)


def _verify_pipeline(cfg: RunConfig, rep: Report):
    solved = _solve(cfg, rep)
    if solved is None:
        return
    om = load_potential(cfg.potential)
    if not heavenly.KahlerMetricBlock.from_potential(om).is_constant():
        raise ConfigError("verify-pipeline needs a potential with constant Omega_{i jbar}")
    rep.add("monge-ampere", heavenly.ma_residual(om).is_zero(), heavenly.ma_residual(om), 0)
    e1 = frame.vierbein_order1(solved, om)
    rep.add("ansatz-sparsity", e1.respects_ansatz())
    o1 = frame.omega1_reconstruct(e1, om)
    rep.artifacts["omega1"] = ratpoly.to_str(o1)
    det = heavenly.det_condition_series(heavenly.potential_series(om, o1), 1)
    for n in (0, 1):
        rep.add(f"det-theta{n}", all(c.is_zero() for c in det.star.coeff(n)),
                det.star.coeff(n)[0], 0)
    fo = heavenly.first_order_residual(om, o1)
    rep.add("first-order-residual", fo.is_zero(), fo, 0)
    rep.add("hessian-relations", frame.mixed_hessian(o1) == frame.first_order_metric(e1, om))


def _ah_sweep(cfg: RunConfig, rep: Report):
    from scipy.integrate import quad

    ks, thetas, psis = ah.default_lattice(cfg.n_k, 8, 8, (cfg.k_min, cfg.k_max))
    leg = agm = 0.0
    for k in ks:
        kp = math.sqrt(1 - k * k)
        K, E, Kp, Ep = ah.elliptic_K(k), ah.elliptic_E(k), ah.elliptic_K(kp), ah.elliptic_E(kp)
        leg = max(leg, abs(E * Kp + Ep * K - K * Kp - math.pi / 2))
        Kq = quad(lambda t: 1 / math.sqrt(1 - (k * math.sin(t)) ** 2), 0, math.pi / 2, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        Eq = quad(lambda t: math.sqrt(1 - (k * math.sin(t)) ** 2), 0, math.pi / 2, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        agm = max(agm, abs(K - Kq), abs(E - Eq))
    rep.add("legendre-relation", leg < 1e-12, leg, 1e-12)
    rep.add("agm-vs-quadrature", agm < 1e-12, agm, 1e-12)
    try:
        rows = ah.ah_sweep(ks, thetas, psis)
    except ah.SignError as exc:
        rep.add("SignError", False, str(exc))
        return
    import numpy as np
    vmin = min(r.V_inv for r in rows)
    eig = min(float(np.linalg.eigvalsh(np.array(r.gamma_ij)).min()) for r in rows)
    quot = max(max(ah.quotient_identities(r).values()) for r in rows)
    rep.add("V_inv-positive", vmin > 0, vmin)
    rep.add("gamma-psd", eig >= -1e-10, eig, 1e-10)
    rep.add("quotient-identities", quot < 1e-12, quot, 1e-12)
    rep.artifacts["rows"] = len(rows)
    table = cfg.table
    if table is None and cfg.out is not None:
        table = str(Path(cfg.out).with_suffix("")) + f"_sweep.{cfg.format}"
    if table is not None:
        ah.write_sweep(rows, table, cfg.format)
        rep.artifacts["table"] = table


def _ah_deformed(cfg: RunConfig, rep: Report):
    rng = random.Random(cfg.seed)
    worst = worst_theta0 = 0.0
    gap = 0.0
    for _ in range(cfg.count):
        rJ, c = rng.uniform(0.1, 3), rng.uniform(-2, 2)
        ds2, dq, dJ2 = rng.uniform(0, 5), rng.uniform(0, 2), rng.uniform(0, 2)
        r = rng.uniform(0.1, 3)
        gam = dJ2 + 4 * r * dq
        th = rng.uniform(-0.5, 0.5)
        o = ah.TodaOrders(rJ, [c], [], rng.uniform(0, 1))
        le = ah.deformed_line_element(o, ds2, dq, dJ2, gam, th, 1)
        closed = (1 + th * c * rJ) * ds2 - 2 * th * c * rJ * rJ * dq
        worst = max(worst, abs(le.first - closed))
        z = ah.deformed_line_element(o, ds2, dq, dJ2, gam, 0.0, 1)
        worst_theta0 = max(worst_theta0, abs(z.first - ds2), abs(z.second - ds2))
        gap = max(gap, abs(le.discrepancy))
    rep.add("constant-Jr-closed-form", worst <= 1e-12, worst, 1e-12)
    rep.add("theta0-reduction", worst_theta0 == 0.0, worst_theta0, 0)
    rep.add("qqbar-n1-example", ah.deformed_qqbar_order(1, 1.0, [1.0], [], 0.0, 3.0) == 1.0)
    rep.info("forms-discrepancy-max", gap)


SUITES: dict[str, Callable[[RunConfig, Report], None]] = {
    "verify-brackets": _verify_brackets,
    "verify-heavenly": _verify_heavenly,
    "solve-first-order": _solve_first_order,
    "verify-pipeline": _verify_pipeline,
    "ah-sweep": _ah_sweep,
    "ah-deformed": _ah_deformed,
}


def run(cfg: RunConfig) -> Report:
    cfg.validate()
    rep = Report(cfg.command, asdict(cfg))
    t0 = time.perf_counter()
    SUITES[cfg.command](cfg, rep)
    rep.wall_time = time.perf_counter() - t0
    return rep


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="moyal-kahler", description=__doc__.splitlines()[0])
    ap.add_argument("--command", required=True, choices=COMMANDS)
    ap.add_argument("--order", type=int, default=2, help="truncation order N")
    ap.add_argument("--params", help="ansatz parameter JSON file or shipped name (case_I, case_II, ...)")
    ap.add_argument("--potential", default="flat", help="fixture name, polynomial file, or literal")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", help="report path (default stdout)")
    ap.add_argument("--format", default="json", choices=("json", "csv"), help="sweep table format")
    ap.add_argument("--table", help="sweep table path")
    ap.add_argument("--count", type=int, default=25, help="random draws per suite")
    ap.add_argument("--max-degree", type=int, default=4)
    ap.add_argument("--k-min", type=float, default=0.2)
    ap.add_argument("--k-max", type=float, default=0.8)
    ap.add_argument("--n-k", type=int, default=10)
    return ap


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(**{k.replace("-", "_"): v for k, v in vars(ns).items()})
    try:
        rep = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(rep.to_json(), indent=2, default=str)
    if cfg.out:
        Path(cfg.out).write_text(text + "\n")
    else:
        print(text)
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
