"""Instability classification and blowup-set membership tests.

Frozen regime facts for N = 1, a = b = 1, p = 3, q = 7 (from resolved
ground-state solves, cross-checked against the closed-form scaling
curve): the criterion d2s <= 0 holds at omega = 1 and omega = 10, fails
at omega = 0.5, and the omega = 10 state has positive energy.
"""

import numpy as np
import pytest

from dpnls.params import MembershipError, PeriodicGrid, ResolutionError
from dpnls.functionals import functionals, h1_distance, nehari_at_scale
from dpnls.stability import (
    classify,
    embed_on_line,
    in_b_omega,
    make_scaled_data,
    omega_sweep_rows,
    remark13_decomposition,
)


GRID = PeriodicGrid(40.0, 8192)


class TestClassification:
    def test_criterion_met_at_omega_one(self, gs1):
        rep = classify(gs1)
        assert rep.criterion_met
        assert rep.d2s == pytest.approx(-0.1429, abs=2e-3)
        assert rep.energy < 0
        assert rep.remark13_consistent

    def test_criterion_fails_at_small_omega(self, gs_half):
        rep = classify(gs_half)
        assert not rep.criterion_met
        assert rep.d2s > 0
        assert rep.remark13_consistent

    def test_positive_energy_forces_criterion(self, gs10):
        rep = classify(gs10)
        assert rep.energy > 0
        assert rep.criterion_met and rep.d2s < 0
        assert rep.remark13_consistent

    def test_decomposition_sums_to_d2s(self, gs1):
        parts = remark13_decomposition(gs1.report, gs1.params)
        assert sum(parts) == pytest.approx(gs1.report.d2s, abs=1e-8)

    def test_decomposition_zero_state(self, params1):
        from dpnls.functionals import report_from_norms
        rep = report_from_norms(0.0, 0.0, 0.0, 0.0, params1)
        assert remark13_decomposition(rep, params1) == (0.0, 0.0, 0.0)

    def test_sweep_rows_shape(self, gs1, gs_half):
        rows = omega_sweep_rows([gs_half, gs1])
        assert [r["omega"] for r in rows] == [0.5, 1.0]
        assert rows[1]["criterion_met"] and not rows[0]["criterion_met"]


class TestMembership:
    def test_scaled_state_inside(self, gs1):
        u0 = make_scaled_data(gs1, 1.2, GRID)
        verdict = in_b_omega(u0, gs1)
        assert verdict.in_set
        ds, dm, k, q = verdict.checks
        assert ds < 0 and k < 0 and q < 0
        assert abs(dm) <= 1e-6 * gs1.report.mass

    def test_ground_state_on_boundary(self, gs1):
        u0 = embed_on_line(gs1, GRID)
        verdict = in_b_omega(u0, gs1)
        # phi sits on the boundary: S, K, Q margins all vanish
        assert not verdict.in_set

    def test_zero_not_inside(self, gs1):
        from dpnls.params import ComplexField
        zero = ComplexField(GRID, np.zeros(GRID.m, dtype=complex))
        assert not in_b_omega(zero, gs1).in_set

    def test_nehari_negative_along_scaling(self, gs1):
        # K(phi^lam) < 0 for every lam > 1, by the closed-form curve
        for lam in (1.05, 1.2, 1.5, 2.0, 3.0):
            assert nehari_at_scale(gs1.report, gs1.params, lam) < 0


class TestScaledData:
    def test_rejects_lambda_at_most_one(self, gs1):
        for lam in (1.0, 0.8):
            with pytest.raises(ValueError):
                make_scaled_data(gs1, lam, GRID)

    def test_mass_preserved(self, gs1):
        u0 = make_scaled_data(gs1, 1.5, GRID)
        assert functionals(u0, gs1.params).mass == pytest.approx(
            gs1.report.mass, rel=1e-6
        )

    def test_distance_shrinks_toward_lambda_one(self, gs1):
        phi = embed_on_line(gs1, GRID)
        dists = [
            h1_distance(make_scaled_data(gs1, lam, GRID), phi, gs1.params)
            for lam in (1.5, 1.2, 1.05)
        ]
        assert dists[0] > dists[1] > dists[2] > 0

    def test_under_resolved_grid_rejected(self, gs1):
        with pytest.raises(ResolutionError):
            make_scaled_data(gs1, 50.0, PeriodicGrid(40.0, 256))

    def test_membership_error_when_not_in_set(self, gs_half):
        # at omega = 0.5 the scaling direction initially raises S, so a
        # slightly compressed state fails the strict S(v) < S(phi) check
        with pytest.raises(MembershipError):
            make_scaled_data(gs_half, 1.01, GRID)
