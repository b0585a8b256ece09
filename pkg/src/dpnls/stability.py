"""Instability classification and the scaled initial data for blowup runs.

A ground state is classified by the concavity of the action along the
mass-preserving scaling curve at lambda = 1: d2s <= 0 is the sufficient
condition for strong instability.  ``in_b_omega`` tests membership in the
invariant blowup set {S < S(phi), mass <= mass(phi), K < 0, Q < 0}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import (
    CertificationError,
    ComplexField,
    MembershipError,
    Params,
    PeriodicGrid,
    ResolutionError,
)
from .functionals import FunctionalReport, functionals, raw_norms, report_from_norms
from .groundstate import GroundStateResult, IDENTITY_RTOL

#: d2s <= CRITERION_BAND * S counts as "<= 0" (equality is admissible).
CRITERION_BAND = 1e-8
#: |margin| below this is reported as indeterminate, not forced to a side.
BORDERLINE = 1e-10


@dataclass(frozen=True)
class StabilityReport:
    omega: float
    d2s: float
    energy: float
    criterion_met: bool
    remark13_consistent: bool

    def as_record(self) -> dict:
        return {"omega": self.omega, "d2s": self.d2s, "energy": self.energy,
                "criterion_met": self.criterion_met,
                "remark13_consistent": self.remark13_consistent}


@dataclass(frozen=True)
class BOmegaVerdict:
    """Membership verdict with the raw margins of the four conditions.

    checks = (S(v) - S(phi), mass(v) - mass(phi), K(v), Q(v)); the first,
    third and fourth must be strictly negative, the second at most zero.
    """

    in_set: bool
    checks: tuple[float, float, float, float]
    indeterminate: bool = False


def _require_certified(gs: GroundStateResult):
    r = gs.report
    tol = IDENTITY_RTOL * abs(r.action)
    if abs(r.nehari) > tol or abs(r.virial) > tol:
        raise CertificationError("ground state fails the K = Q = 0 identities")


def remark13_decomposition(report: FunctionalReport,
                           params: Params) -> tuple[float, float, float]:
    """Three summands whose total equals d2s for a state with Q ~ 0:
    (alpha+1) Q, -2 alpha E, and the negative q-power term."""
    al, be = params.alpha, params.beta
    t1 = (al + 1.0) * report.virial
    t2 = -2.0 * al * report.energy
    t3 = -params.b * (be - 2.0) * (be - al) / (params.q + 1.0) * report.lq
    return (t1, t2, t3)


def classify(gs: GroundStateResult) -> StabilityReport:
    """Evaluate the instability criterion and the positive-energy check."""
    _require_certified(gs)
    r, params = gs.report, gs.params
    d2s = r.d2s
    met = d2s <= CRITERION_BAND * abs(r.action)
    tol = CRITERION_BAND * max(1.0, abs(r.action))
    consistent = True
    if r.energy > tol and not (d2s < -tol):
        consistent = False
    parts = remark13_decomposition(r, params)
    if abs(sum(parts) - d2s) > 1e-8 * max(1.0, abs(d2s)):
        consistent = False
    return StabilityReport(params.omega, d2s, r.energy, met, consistent)


def in_b_omega(v, gs: GroundStateResult) -> BOmegaVerdict:
    """Test the four defining inequalities of the blowup set."""
    rv = functionals(v, gs.params)
    rg = gs.report
    checks = (rv.action - rg.action, rv.mass - rg.mass, rv.nehari, rv.virial)
    strict = (checks[0], checks[2], checks[3])
    # the mass comparison is weak; allow resampling error at the scale the
    # scaling family preserves it
    mass_band = 1e-6 * rg.mass
    indeterminate = any(abs(c) < BORDERLINE for c in strict) or \
        0.0 < checks[1] <= mass_band
    in_set = all(c < 0 for c in strict) and checks[1] <= mass_band
    return BOmegaVerdict(bool(in_set), checks, bool(indeterminate))


def make_scaled_data(gs: GroundStateResult, lam: float,
                     grid: PeriodicGrid) -> ComplexField:
    """phi^lambda embedded on the evolution grid by even reflection (N = 1).

    Verifies blowup-set membership of the embedded state before returning.
    """
    if lam <= 1.0:
        raise ValueError("lambda must exceed 1")
    if gs.params.N != 1:
        raise ValueError("line embedding is defined for N = 1 profiles")
    width = _profile_half_width(gs)
    if width / lam < 8 * grid.spacing:
        raise ResolutionError(
            f"compressed half-width {width / lam:.3g} under-resolved by "
            f"spacing {grid.spacing:.3g}")
    x = grid.x
    vals, _ = gs.resample(lam * np.abs(x))
    u0 = ComplexField(grid, np.sqrt(lam) * vals.astype(complex))
    verdict = in_b_omega(u0, gs)
    if not verdict.in_set:
        raise MembershipError(f"embedded state not in the blowup set: "
                              f"margins {verdict.checks}")
    return u0


def embed_on_line(gs: GroundStateResult, grid: PeriodicGrid) -> ComplexField:
    """phi itself on the evolution grid (standing-wave initial data)."""
    vals, _ = gs.resample(np.abs(grid.x))
    return ComplexField(grid, vals.astype(complex))


def _profile_half_width(gs: GroundStateResult) -> float:
    vals = gs.profile.values
    half = np.nonzero(vals < vals[0] / 2.0)[0]
    i = half[0] if half.size else vals.size - 1
    return float(gs.profile.grid.r[i])


def omega_sweep_rows(results) -> list[dict]:
    """Flat records (omega, d2s, energy, criterion_met) for CSV export."""
    rows = []
    for res in results:
        rep = classify(res)
        rows.append(rep.as_record())
    return rows
