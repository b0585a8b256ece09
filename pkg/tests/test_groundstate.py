"""Ground-state solver tests.

The main oracle is the single-power soliton: with a = 0 the stationary
equation on the line has the closed form

    phi(x) = A sech(s x)^{2/(q-1)},  A = ((q+1) omega / (2 b))^{1/(q-1)},
    s = (q-1) sqrt(omega) / 2,

which we evaluate through Params.relaxed (the exponent window check would
reject a = 0 as a double-power problem).  For the full double-power
equation the first integral at the origin pins the amplitude to machine
precision, and the Nehari / virial certificates are checked directly.
"""

import numpy as np
import pytest

from dpnls.params import (
    NoBracketError,
    Params,
    RadialGrid,
    RadialProfile,
    TailError,
)
from dpnls.functionals import functionals
from dpnls.groundstate import (
    amplitude_ceiling,
    decay_fit,
    default_grid,
    find_bracket,
    first_integral_amplitude,
    residual_norm,
    shoot_classify,
    solve_ground_state,
)
from dpnls.lemma_lab import rescale_to_nehari

from conftest import BASE, gaussian_profile


def sech_soliton(params, grid):
    """Closed-form single-power (a=0) soliton profile with derivative."""
    q, b, om = params.q, params.b, params.omega
    amp = ((q + 1.0) * om / (2.0 * b)) ** (1.0 / (q - 1.0))
    s = (q - 1.0) * np.sqrt(om) / 2.0
    r = grid.r
    sech = 1.0 / np.cosh(s * r)
    vals = amp * sech ** (2.0 / (q - 1.0))
    der = vals * (-2.0 * s / (q - 1.0)) * np.tanh(s * r)
    return RadialProfile(grid, vals, der)


class TestAmplitudeOracle:
    def test_first_integral_value(self, params1):
        # omega phi0^2 = (2a/(p+1)) phi0^4 + (2b/(q+1)) phi0^8 with a=b=1:
        # y^3 + 2y - 4 = 0 for y = phi0^2 (after clearing denominators).
        phi0 = first_integral_amplitude(params1)
        y = phi0 ** 2
        assert y ** 3 / 4.0 + y / 2.0 - 1.0 == pytest.approx(0.0, abs=1e-14)
        assert phi0 == pytest.approx(1.086052, abs=1e-5)

    @pytest.mark.parametrize("omega", [0.5, 1.0, 2.0, 10.0])
    def test_solver_matches_first_integral(self, omega):
        params = Params(omega=omega, **BASE)
        gs = solve_ground_state(params)
        assert gs.amplitude == pytest.approx(
            first_integral_amplitude(params), rel=1e-5
        )

    def test_ceiling_above_amplitude(self, params1, gs1):
        assert amplitude_ceiling(params1) > gs1.amplitude


class TestCertificates:
    def test_nehari_and_virial_vanish(self, gs1):
        scale = abs(gs1.report.action)
        assert abs(gs1.report.nehari) <= 1e-6 * scale
        assert abs(gs1.report.virial) <= 1e-6 * scale

    def test_residual_small(self, gs1):
        assert gs1.residual <= 1e-8

    def test_decay_rate_near_sqrt_omega(self, gs1):
        assert 0.9 <= gs1.decay_rate <= 1.1

    def test_decay_rate_scales(self):
        gs = solve_ground_state(Params(omega=4.0, **BASE))
        assert gs.decay_rate == pytest.approx(2.0, rel=0.1)

    def test_bracket_straddles_amplitude(self, gs1):
        lo, hi = gs1.bracket
        assert lo < gs1.amplitude < hi


class TestSechOracle:
    """Residual of the exact single-power soliton under the FD residual."""

    def params(self):
        return Params.relaxed(N=1, a=0.0, b=1.0, p=3.0, q=3.0, omega=1.0)

    def test_residual_second_order(self):
        params = self.params()
        norms = []
        for n in (501, 1001, 2001):
            prof = sech_soliton(params, RadialGrid(20.0, n))
            norms.append(residual_norm(prof, params))
        # halving h should cut the FD residual by ~4
        assert norms[0] / norms[1] == pytest.approx(4.0, rel=0.2)
        assert norms[1] / norms[2] == pytest.approx(4.0, rel=0.2)

    def test_gaussian_not_a_solution(self):
        params = self.params()
        prof = gaussian_profile(rmax=20.0, n=2001)
        assert residual_norm(prof, params) > 1e-2


class TestShooting:
    def test_classification_monotone(self, params1):
        rmax = default_grid(params1).rmax
        lo, hi = find_bracket(params1, rmax)
        amps = np.linspace(0.5 * lo, 1.5 * hi, 25)
        signs = [shoot_classify(params1, a, rmax) for a in amps]
        nonzero = [s for s in signs if s != 0]
        # undershoots below the bracket, overshoots above, one switch
        assert nonzero[0] == -1 and nonzero[-1] == 1
        switches = sum(
            1 for s0, s1 in zip(nonzero, nonzero[1:]) if s0 != s1
        )
        assert switches == 1

    def test_no_bracket_for_defocusing_signs(self):
        # with both powers repulsive there is no turning amplitude at all
        params = Params.relaxed(
            N=1, a=-1.0, b=-1.0, p=3.0, q=7.0, omega=1.0
        )
        with pytest.raises(NoBracketError):
            find_bracket(params, 10.0)


class TestDecayFit:
    def test_pure_exponential(self):
        grid = RadialGrid(30.0, 3001)
        prof = RadialProfile(grid, np.exp(-2.0 * grid.r))
        assert decay_fit(prof, 4.0) == pytest.approx(2.0, abs=1e-6)

    def test_rejects_growing_tail(self):
        grid = RadialGrid(10.0, 1001)
        prof = RadialProfile(grid, np.exp(0.3 * grid.r))
        with pytest.raises(TailError):
            decay_fit(prof, 1.0)


class TestGridConsistency:
    def test_refinement_agrees(self, params1, gs1):
        fine = solve_ground_state(
            params1, RadialGrid(gs1.profile.grid.rmax, 8001)
        )
        assert fine.amplitude == pytest.approx(gs1.amplitude, rel=1e-8)
        assert fine.report.action == pytest.approx(
            gs1.report.action, rel=1e-6
        )


class TestMinimality:
    """S(phi) should undercut S of competing Nehari states."""

    def test_gaussians_lie_above(self, params1, gs1):
        s_phi = gs1.report.action
        for width in (0.5, 1.0, 2.0):
            prof = gaussian_profile(width=width)
            mu, rep = rescale_to_nehari(prof, params1)
            assert mu > 0
            assert rep.action > s_phi - 1e-10
