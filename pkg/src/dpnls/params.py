"""Equation parameters, grids, and discrete states for the double-power NLS.

The equation is i u_t = -Δu - a|u|^{p-1}u - b|u|^{q-1}u on R^N with one
L²-subcritical power p and one L²-supercritical power q.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class InvalidStateError(ValueError):
    """State contains non-finite samples or mismatched grid."""


class ResolutionError(ValueError):
    """Grid cannot resolve the requested state."""


class NoBracketError(RuntimeError):
    """Shooting residual has no sign change over the amplitude interval."""


class ConvergenceError(RuntimeError):
    """Iteration did not reach the requested tolerance."""


class CertificationError(ValueError):
    """Ground-state identities not satisfied to tolerance."""


class TailError(ValueError):
    """Profile tail is contaminated (nonpositive values) for decay fitting."""


class MembershipError(ValueError):
    """Constructed state failed the blowup-set membership check."""


class PreconditionError(ValueError):
    """A documented hypothesis of the operation is violated."""


@dataclass(frozen=True)
class Params:
    """Equation parameters (N, a, b, p, q, omega) with derived scaling exponents.

    Admissibility: a, b, omega > 0 and 1 < p < 1 + 4/N < q, with
    q < 1 + 4/(N-2) for N >= 3.  Validation can be skipped via
    ``Params.relaxed`` for test oracles that need degenerate coefficients
    (e.g. the single-power soliton with a = 0).
    """

    N: int
    a: float
    b: float
    p: float
    q: float
    omega: float
    _validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if not self._validate:
            return
        if self.N < 1 or self.N != int(self.N):
            raise ValueError(f"N must be a positive integer, got {self.N}")
        if self.a <= 0 or self.b <= 0:
            raise ValueError("coefficients a, b must be positive")
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        lo = 1.0 + 4.0 / self.N
        if not (1.0 < self.p < lo < self.q):
            raise ValueError(
                f"need 1 < p < {lo} < q, got p={self.p}, q={self.q}")
        if self.N >= 3 and self.q >= 1.0 + 4.0 / (self.N - 2):
            raise ValueError(
                f"q must be below {1 + 4 / (self.N - 2)} for N={self.N}")

    @classmethod
    def relaxed(cls, N, a, b, p, q, omega) -> "Params":
        """Construct without admissibility checks (test oracles only)."""
        return cls(N, a, b, p, q, omega, _validate=False)

    @property
    def alpha(self) -> float:
        """Scaling exponent of the p-power term, N(p-1)/2, in (0, 2)."""
        return self.N * (self.p - 1.0) / 2.0

    @property
    def beta(self) -> float:
        """Scaling exponent of the q-power term, N(q-1)/2, above 2."""
        return self.N * (self.q - 1.0) / 2.0

    def with_omega(self, omega: float) -> "Params":
        return Params(self.N, self.a, self.b, self.p, self.q, omega,
                      _validate=self._validate)


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial grid r_j = j * spacing, j = 0 .. n-1."""

    rmax: float
    n: int

    def __post_init__(self):
        if self.rmax <= 0:
            raise ValueError("rmax must be positive")
        if self.n < 2:
            raise ValueError("need at least 2 nodes")

    @property
    def spacing(self) -> float:
        return self.rmax / (self.n - 1)

    @property
    def r(self) -> np.ndarray:
        return np.linspace(0.0, self.rmax, self.n)


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform periodic 1D grid of length L centered at the origin."""

    length: float
    m: int

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("length must be positive")
        if self.m < 2:
            raise ValueError("need at least 2 nodes")

    @property
    def spacing(self) -> float:
        return self.length / self.m

    @property
    def x(self) -> np.ndarray:
        return -self.length / 2.0 + self.spacing * np.arange(self.m)

    @property
    def wavenumbers(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.m, d=self.spacing)


@dataclass(frozen=True)
class RadialProfile:
    """Real radial samples phi(r_j), optionally with derivative samples.

    When ``deriv`` is present the gradient norm is computed from it; grids
    produced by the ground-state solver always carry it.
    """

    grid: RadialGrid
    values: np.ndarray
    deriv: np.ndarray | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.shape != (self.grid.n,):
            raise InvalidStateError("values shape does not match grid")
        if not np.all(np.isfinite(v)):
            raise InvalidStateError("non-finite profile samples")
        if self.deriv is not None:
            d = np.asarray(self.deriv, dtype=float)
            object.__setattr__(self, "deriv", d)
            if d.shape != v.shape or not np.all(np.isfinite(d)):
                raise InvalidStateError("invalid derivative samples")


@dataclass(frozen=True)
class ComplexField:
    """Complex state on a periodic 1D grid, or radial with a dimension tag."""

    grid: PeriodicGrid | RadialGrid
    values: np.ndarray
    dim: int = 1

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", v)
        n = self.grid.m if isinstance(self.grid, PeriodicGrid) else self.grid.n
        if v.shape != (n,):
            raise InvalidStateError("values shape does not match grid")
        if not np.all(np.isfinite(v)):
            raise InvalidStateError("non-finite field samples")
        if isinstance(self.grid, PeriodicGrid) and self.dim != 1:
            raise InvalidStateError("periodic grid is one-dimensional")
