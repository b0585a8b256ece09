"""Scalar functionals of a state: mass, energy, action, Nehari, virial.

All functionals are integrals over R^N.  Radial states are integrated with
the weight sigma_N r^{N-1}; periodic 1D states with uniform weights.  The
scaling family v^lambda(x) = lambda^{N/2} v(lambda x) leaves the mass
invariant and acts on the other norms by closed-form powers of lambda,
which is what ``s_along_scaling`` evaluates.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict
from math import gamma, pi

import numpy as np
from scipy.interpolate import CubicSpline

from .params import (
    ComplexField,
    InvalidStateError,
    Params,
    PeriodicGrid,
    RadialGrid,
    RadialProfile,
    ResolutionError,
)

State = RadialProfile | ComplexField

#: Minimum number of nodes across the half-width after rescaling.
MIN_NODES_ACROSS_WIDTH = 16


def sphere_area(N: int) -> float:
    """Surface area of the unit sphere in R^N (2 for N = 1)."""
    return 2.0 * pi ** (N / 2.0) / gamma(N / 2.0)


def _radial_dim(state: State) -> int:
    return 1 if isinstance(state, RadialProfile) else state.dim


def integrate_radial(grid: RadialGrid, samples: np.ndarray, N: int) -> float:
    """sigma_N * trapezoid of samples * r^{N-1} over [0, rmax]."""
    r = grid.r
    return sphere_area(N) * float(np.trapezoid(samples * r ** (N - 1), dx=grid.spacing))


def quadrature(state: State, N: int | None = None) -> float:
    """Integral of the state's samples over the computational domain.

    Radial states use the full-space radial weight; periodic states use the
    uniform rule (exact for trigonometric polynomials).
    """
    if isinstance(state, RadialProfile):
        if not np.all(np.isfinite(state.values)):
            raise InvalidStateError("non-finite samples")
        return integrate_radial(state.grid, state.values, N or 1)
    if isinstance(state.grid, PeriodicGrid):
        return float(np.real(np.sum(state.values)) * state.grid.spacing)
    return integrate_radial(state.grid, np.real(state.values), state.dim)


@dataclass(frozen=True)
class FunctionalReport:
    """Every scalar functional of one state for fixed parameters."""

    mass: float      # ||v||_{L2}^2
    grad: float      # ||grad v||_{L2}^2
    lp: float        # ||v||_{L^{p+1}}^{p+1}
    lq: float        # ||v||_{L^{q+1}}^{q+1}
    energy: float
    action: float
    nehari: float
    virial: float
    bigf: float
    d2s: float       # second lambda-derivative of the action along v^lambda

    def as_record(self) -> dict:
        return asdict(self)


def _grad_sq_samples(state: State) -> tuple[np.ndarray, object]:
    """|grad v|^2 samples and the grid they live on."""
    if isinstance(state, RadialProfile):
        if state.deriv is not None:
            d = state.deriv
        else:
            d = np.gradient(state.values, state.grid.spacing, edge_order=2)
        return d ** 2, state.grid
    if isinstance(state.grid, PeriodicGrid):
        k = state.grid.wavenumbers
        du = np.fft.ifft(1j * k * np.fft.fft(state.values))
        return np.abs(du) ** 2, state.grid
    d = np.gradient(state.values, state.grid.spacing, edge_order=2)
    return np.abs(d) ** 2, state.grid


def raw_norms(state: State, params: Params) -> tuple[float, float, float, float]:
    """(mass, grad, lp, lq) of a state under the given parameters."""
    mod = np.abs(np.asarray(state.values))
    if not np.all(np.isfinite(mod)):
        raise InvalidStateError("non-finite samples")
    N = params.N if isinstance(state, RadialProfile) else _radial_dim(state)

    def integ(samples):
        if isinstance(state.grid, PeriodicGrid):
            return float(np.sum(samples) * state.grid.spacing)
        return integrate_radial(state.grid, samples, N)

    mass = integ(mod ** 2)
    gsq, _ = _grad_sq_samples(state)
    grad = integ(gsq)
    lp = integ(mod ** (params.p + 1))
    lq = integ(mod ** (params.q + 1))
    for name, val in (("mass", mass), ("grad", grad), ("lp", lp), ("lq", lq)):
        if not np.isfinite(val):
            raise InvalidStateError(f"non-finite {name}")
    return mass, grad, lp, lq


def report_from_norms(mass, grad, lp, lq, params: Params) -> FunctionalReport:
    a, b, p, q, w = params.a, params.b, params.p, params.q, params.omega
    al, be = params.alpha, params.beta
    energy = 0.5 * grad - a / (p + 1) * lp - b / (q + 1) * lq
    action = energy + 0.5 * w * mass
    nehari = grad + w * mass - a * lp - b * lq
    virial = grad - a * al / (p + 1) * lp - b * be / (q + 1) * lq
    bigf = a * (p - 1) / (p + 1) * lp + b * (q - 1) / (q + 1) * lq
    d2s = grad - a * al * (al - 1) / (p + 1) * lp - b * be * (be - 1) / (q + 1) * lq
    return FunctionalReport(mass, grad, lp, lq, energy, action, nehari,
                            virial, bigf, d2s)


def functionals(state: State, params: Params) -> FunctionalReport:
    """Compute the full functional report of a state."""
    return report_from_norms(*raw_norms(state, params), params)


def _half_width(values: np.ndarray, spacing: float) -> float:
    peak = np.max(np.abs(values))
    if peak == 0:
        return 0.0
    above = np.abs(values) >= peak / 2.0
    return max(float(np.count_nonzero(above)) * spacing, spacing)


def scale_field(state: State, lam: float, params: Params | None = None) -> State:
    """Apply the mass-preserving scaling v^lambda(x) = lambda^{N/2} v(lambda x).

    Resamples by cubic spline with zero extension beyond the grid; raises
    ResolutionError when the compressed state would be carried by fewer
    than MIN_NODES_ACROSS_WIDTH nodes.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if lam == 1.0:
        return state
    N = params.N if (params is not None and isinstance(state, RadialProfile)) \
        else _radial_dim(state)
    amp = lam ** (N / 2.0)
    if isinstance(state, RadialProfile):
        r = state.grid.r
        spl = CubicSpline(r, state.values)
        rs = lam * r
        vals = np.where(rs <= state.grid.rmax, amp * spl(np.minimum(rs, state.grid.rmax)), 0.0)
        if state.deriv is not None:
            dspl = CubicSpline(r, state.deriv)
            der = np.where(rs <= state.grid.rmax,
                           amp * lam * dspl(np.minimum(rs, state.grid.rmax)), 0.0)
        else:
            der = None
        _check_resolved(vals, state.grid.spacing)
        return RadialProfile(state.grid, vals, der)
    if isinstance(state.grid, PeriodicGrid):
        x = state.grid.x
        re = CubicSpline(x, np.real(state.values))
        im = CubicSpline(x, np.imag(state.values))
        xs = lam * x
        inside = (xs >= x[0]) & (xs <= x[-1])
        xc = np.clip(xs, x[0], x[-1])
        vals = np.where(inside, amp * (re(xc) + 1j * im(xc)), 0.0)
        _check_resolved(vals, state.grid.spacing)
        return ComplexField(state.grid, vals)
    r = state.grid.r
    re = CubicSpline(r, np.real(state.values))
    im = CubicSpline(r, np.imag(state.values))
    rs = lam * r
    inside = rs <= state.grid.rmax
    rc = np.minimum(rs, state.grid.rmax)
    vals = np.where(inside, amp * (re(rc) + 1j * im(rc)), 0.0)
    _check_resolved(vals, state.grid.spacing)
    return ComplexField(state.grid, vals, dim=state.dim)


def _check_resolved(values: np.ndarray, spacing: float):
    hw = _half_width(values, spacing)
    if hw > 0 and hw / spacing < MIN_NODES_ACROSS_WIDTH:
        raise ResolutionError(
            f"rescaled state carried by ~{hw / spacing:.0f} nodes across its "
            f"half-width (need {MIN_NODES_ACROSS_WIDTH})")


def action_at_scale(report: FunctionalReport, params: Params, lam) -> np.ndarray:
    """S_omega(v^lambda) from the base report's norms (no re-gridding)."""
    lam = np.asarray(lam, dtype=float)
    a, b, p, q, w = params.a, params.b, params.p, params.q, params.omega
    return (0.5 * lam ** 2 * report.grad + 0.5 * w * report.mass
            - a * lam ** params.alpha / (p + 1) * report.lp
            - b * lam ** params.beta / (q + 1) * report.lq)


def virial_at_scale(report: FunctionalReport, params: Params, lam) -> np.ndarray:
    """Q(v^lambda) = lambda * dS/dlambda from the base report's norms."""
    lam = np.asarray(lam, dtype=float)
    a, b, p, q = params.a, params.b, params.p, params.q
    al, be = params.alpha, params.beta
    return (lam ** 2 * report.grad
            - a * al * lam ** al / (p + 1) * report.lp
            - b * be * lam ** be / (q + 1) * report.lq)


def nehari_at_scale(report: FunctionalReport, params: Params, lam) -> np.ndarray:
    """K_omega(v^lambda) from the base report's norms."""
    lam = np.asarray(lam, dtype=float)
    a, b = params.a, params.b
    return (lam ** 2 * report.grad + params.omega * report.mass
            - a * lam ** params.alpha * report.lp
            - b * lam ** params.beta * report.lq)


def s_along_scaling(state_or_report, params: Params, lambdas):
    """(lambda, S(v^lambda), Q(v^lambda)) along the scaling curve.

    Accepts a state or a precomputed FunctionalReport; uses the closed-form
    lambda-dependence so that Q = lambda * dS/dlambda holds by construction.
    """
    lams = np.asarray(lambdas, dtype=float)
    if lams.size == 0:
        raise ValueError("empty lambda list")
    if np.any(lams <= 0):
        raise ValueError("lambda values must be positive")
    if np.any(np.diff(lams) < 0):
        raise ValueError("lambda values must be sorted")
    report = (state_or_report if isinstance(state_or_report, FunctionalReport)
              else functionals(state_or_report, params))
    s = action_at_scale(report, params, lams)
    qv = virial_at_scale(report, params, lams)
    return [(float(l), float(sv), float(qq)) for l, sv, qq in zip(lams, s, qv)]


def h1_distance(u: State, v: State, params: Params) -> float:
    """H^1 distance sqrt(||u-v||_{L2}^2 + ||grad(u-v)||_{L2}^2)."""
    if isinstance(u, RadialProfile) and isinstance(v, RadialProfile):
        if u.grid != v.grid:
            raise InvalidStateError("grids differ")
        dvals = u.values - v.values
        dder = None
        if u.deriv is not None and v.deriv is not None:
            dder = u.deriv - v.deriv
        diff = RadialProfile(u.grid, dvals, dder)
        m, g, _, _ = raw_norms(diff, params)
        return float(np.sqrt(m + g))
    if u.grid != v.grid:
        raise InvalidStateError("grids differ")
    diff = ComplexField(u.grid, np.asarray(u.values) - np.asarray(v.values),
                        dim=getattr(u, "dim", 1))
    m, g, _, _ = raw_norms(diff, params)
    return float(np.sqrt(m + g))
