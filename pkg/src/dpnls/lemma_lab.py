"""Inequality machinery behind the key estimate Q/2 <= S - S(phi).

The estimate is proved through a chain of scalar inequalities in the
exponents (alpha, beta) and a rescaling parameter lambda in (0, 1]:
h >= 0, g2 <= 0, g3 >= 0 and g1 >= 0.  This module evaluates each of them
in numerically stable form, constructs the Nehari-crossing lambda_0 for a
given state, and checks the estimate itself on sampled states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .params import Params, PreconditionError, RadialProfile
from .functionals import (
    FunctionalReport,
    action_at_scale,
    functionals,
    nehari_at_scale,
    report_from_norms,
)
from .groundstate import GroundStateResult


@dataclass(frozen=True)
class ExponentPair:
    """Admissible scaling exponents: 0 < alpha < 2 < beta."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (0.0 < self.alpha < 2.0 < self.beta):
            raise ValueError(f"need 0 < alpha < 2 < beta, got {self}")

    @classmethod
    def of(cls, params: Params) -> "ExponentPair":
        return cls(params.alpha, params.beta)


@dataclass(frozen=True)
class KeyEstimateCheck:
    lambda0: float
    lhs: float     # Q(v)/2
    rhs: float     # S(v) - S(phi)
    margin: float  # rhs - lhs


def _pow1(k, lam):
    """lambda^k - 1, accurate through the double zero at lambda = 1."""
    return np.expm1(k * np.log(lam))


def _check_lam(lam, open_right=False):
    lam = np.asarray(lam, dtype=float)
    hi_ok = np.all(lam < 1.0) if open_right else np.all(lam <= 1.0)
    if np.any(lam <= 0.0) or not hi_ok:
        raise ValueError("lambda out of range")
    return lam


def h_fn(lam, ep: ExponentPair):
    """(2-a)(b-2) - 2b lam^-a + (ab - 2a + 4) lam^-2; >= 0 on (0, 1]."""
    lam = _check_lam(lam)
    al, be = ep.alpha, ep.beta
    return ((2 - al) * (be - 2) - 2 * be * lam ** (-al)
            + (al * be - 2 * al + 4) * lam ** (-2.0))


def g2_fn(lam, ep: ExponentPair):
    lam = _check_lam(lam)
    al, be = ep.alpha, ep.beta
    return (2 * al * (2 - al) * lam ** be - al * be * (be - al) * lam ** 2
            + 2 * be * (be - 2) * lam ** al - (2 - al) * (be - 2) * (be - al))


def g3_fn(lam, ep: ExponentPair):
    lam = _check_lam(lam)
    al, be = ep.alpha, ep.beta
    return (2 - al) * lam ** (be - al) - (be - al) * lam ** (2 - al) + be - 2


def g1_fn(lam, ep: ExponentPair):
    """Stabilized g1; the two double zeros at lambda = 1 are evaluated as
    differences lambda^k - 1 so the ratio stays accurate near 1."""
    lam = _check_lam(lam, open_right=True)
    al, be = ep.alpha, ep.beta
    # numerator factor 2 lam^be - be lam^2 - 2 + be = 2(lam^be-1) - be(lam^2-1)
    u = 2 * _pow1(be, lam) - be * _pow1(2, lam)
    # denominator factor al lam^2 - 2 lam^al - al + 2 = al(lam^2-1) - 2(lam^al-1)
    w = al * _pow1(2, lam) - 2 * _pow1(al, lam)
    if np.any(np.abs(w) < 1e-14):
        raise ZeroDivisionError("g1 denominator too close to zero")
    c = al * be + 4 - 2 * al - al * be * lam ** (2 - al)
    term1 = al * u * c / (w * lam ** (be - al))
    return term1 - be * (2 * be - al * be - 4) - al * be ** 2 / lam ** (be - 2)


def sample_exponent_pairs(rng: np.random.Generator, count: int) -> list[ExponentPair]:
    """Random admissible pairs, alpha in (0.05, 1.95), beta in (2.05, 6)."""
    al = rng.uniform(0.05, 1.95, size=count)
    be = rng.uniform(2.05, 6.0, size=count)
    return [ExponentPair(float(a), float(b)) for a, b in zip(al, be)]


def sign_suite(pairs, lam_grid=None) -> list[dict]:
    """Worst-case values of h, g1, g2, g3 over a lambda grid per pair.

    The grid stays 1e-6 away from both endpoints; claims live on (0, 1).
    """
    if lam_grid is None:
        lam_grid = np.linspace(1e-6, 1.0 - 1e-6, 10000)
    rows = []
    for ep in pairs:
        hv = h_fn(lam_grid, ep)
        g1 = g1_fn(lam_grid, ep)
        g2 = g2_fn(lam_grid, ep)
        g3 = g3_fn(lam_grid, ep)
        rows.append({
            "alpha": ep.alpha, "beta": ep.beta,
            "h_min": float(np.min(hv)), "g1_min": float(np.min(g1)),
            "g2_max": float(np.max(g2)), "g3_min": float(np.min(g3)),
            "g1_max_increase": float(np.max(np.diff(g1))),
            "g3_max_increase": float(np.max(np.diff(g3))),
        })
    return rows


def find_lambda0(v, params: Params) -> float:
    """lambda_0 in (0, 1] with K(v^lambda_0) = 0, by root-finding on the
    closed-form lambda-dependence (K -> omega * mass > 0 as lambda -> 0)."""
    report = v if isinstance(v, FunctionalReport) else functionals(v, params)
    if report.mass <= 0:
        raise ValueError("zero state has no Nehari crossing")
    if report.nehari > 0:
        raise PreconditionError("K(v) must be <= 0")
    if report.nehari == 0.0:
        return 1.0
    k = lambda lam: float(nehari_at_scale(report, params, lam))
    lo = 0.5
    while k(lo) <= 0:
        lo *= 0.5
        if lo < 1e-12:
            raise PreconditionError("no sign change of K on (0, 1)")
    lam0 = brentq(k, lo, 1.0, xtol=1e-14, rtol=8.9e-16)
    return float(lam0)


def f_curve(report: FunctionalReport, params: Params, q_of_v: float, lam):
    """f(lambda) = S(v^lambda) - lambda^2/2 * Q(v), closed form."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("lambda must be positive")
    return action_at_scale(report, params, lam) - 0.5 * lam ** 2 * q_of_v


def check_hypotheses(report: FunctionalReport, gs: GroundStateResult) -> None:
    """Raise PreconditionError naming the first failing Lemma hypothesis."""
    if report.mass <= 0:
        raise PreconditionError("v = 0")
    if report.mass > gs.report.mass * (1 + 1e-12):
        raise PreconditionError("mass(v) > mass(phi)")
    if report.nehari > 0:
        raise PreconditionError("K(v) > 0")
    if report.virial > 0:
        raise PreconditionError("Q(v) > 0")


def key_estimate_check(v, gs: GroundStateResult) -> KeyEstimateCheck:
    """Evaluate Q(v)/2 <= S(v) - S(phi) for a state meeting the hypotheses.

    Also verifies the intermediate step S(phi) <= S(v^lambda_0) of the
    inequality chain.
    """
    params = gs.params
    report = v if isinstance(v, FunctionalReport) else functionals(v, params)
    check_hypotheses(report, gs)
    lam0 = find_lambda0(report, params)
    lhs = report.virial / 2.0
    rhs = report.action - gs.report.action
    s_at_lam0 = float(action_at_scale(report, params, lam0))
    scale = max(abs(gs.report.action), abs(s_at_lam0))
    if gs.report.action > s_at_lam0 + 1e-8 * scale:
        raise PreconditionError(
            f"chain step violated: S(phi) = {gs.report.action:.6g} > "
            f"S(v^lam0) = {s_at_lam0:.6g}")
    return KeyEstimateCheck(lam0, float(lhs), float(rhs), float(rhs - lhs))


def rescale_to_nehari(v, params: Params):
    """Amplitude mu > 0 with K(mu v) = 0; returns (mu, report of mu*v).

    K(mu v)/mu^2 is strictly decreasing in mu, so the crossing is unique.
    """
    report = v if isinstance(v, FunctionalReport) else functionals(v, params)
    if report.mass <= 0:
        raise ValueError("cannot rescale the zero state")
    if report.lp <= 0 or report.lq <= 0:
        raise ValueError("state needs nonvanishing power norms")
    p, q, a, b = params.p, params.q, params.a, params.b
    quad = report.grad + params.omega * report.mass

    def k_over_mu2(mu):
        return quad - a * mu ** (p - 1) * report.lp - b * mu ** (q - 1) * report.lq

    hi = 1.0
    while k_over_mu2(hi) > 0:
        hi *= 2.0
    lo = hi / 2.0
    while k_over_mu2(lo) < 0:
        lo *= 0.5
    mu = float(brentq(k_over_mu2, lo, hi, xtol=1e-14, rtol=8.9e-16))
    return mu, report_from_norms(mu ** 2 * report.mass, mu ** 2 * report.grad,
                                 mu ** (p + 1) * report.lp,
                                 mu ** (q + 1) * report.lq, params)


def aim_inequality_margin(report: FunctionalReport, params: Params,
                          lam0: float) -> float:
    """Margin of the lambda_0 comparison between the two power norms:
    rhs_coeff * lq/(q+1) * b - a * lp/(p+1) >= 0."""
    al, be = params.alpha, params.beta
    num = 2 * lam0 ** be - be * lam0 ** 2 - 2 + be
    den = al * lam0 ** 2 - 2 * lam0 ** al - al + 2
    lhs = params.a / (params.p + 1) * report.lp
    rhs = params.b / (params.q + 1) * (num / den) * report.lq
    return float(rhs - lhs)


def perturbed_profiles(gs: GroundStateResult, rng: np.random.Generator,
                       count: int, max_eps: float = 0.1):
    """Candidate states (1 + eps*bump) * phi^lam with analytic derivatives.

    Yields RadialProfile candidates; callers filter them through the Lemma
    hypotheses before use.
    """
    g = gs.profile.grid
    r = g.r
    out = []
    for _ in range(count):
        lam = rng.uniform(1.0, 3.0)
        eps = rng.uniform(-max_eps, max_eps)
        r0 = rng.uniform(0.0, g.rmax / 4.0)
        w = rng.uniform(0.5, 3.0) / np.sqrt(gs.params.omega)
        base, dbase = gs.resample(lam * r)
        amp = lam ** (gs.params.N / 2.0)
        bump = np.exp(-((r - r0) / w) ** 2)
        dbump = bump * (-2.0 * (r - r0) / w ** 2)
        vals = amp * base * (1.0 + eps * bump)
        der = amp * (lam * dbase * (1.0 + eps * bump) + base * eps * dbump)
        out.append(RadialProfile(g, vals, der))
    return out
