"""Dimensionless parameters, physical-unit conversion, and validated states.

Everything the simulator touches is dimensionless, with the collective
(superradiant) time constant tau_R as the unit of time.  The conversion
between laboratory (CGS) inputs and the dimensionless parameter set lives
entirely in :func:`derive_dimensionless` and :func:`estimate_timescales`;
no other part of the package knows about seconds or centimetres.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ParameterError",
    "NormalizationViolation",
    "NegativeLfc",
    "FilmTooThick",
    "TraceViolation",
    "PositivityViolation",
    "SystemParams",
    "PhysicalInputs",
    "DensityState",
    "make_params",
    "derive_dimensionless",
    "estimate_timescales",
    "initial_state",
    "POSITIVITY_TOL",
    "HBAR_CGS",
]

#: Planck constant / 2 pi, erg s (CGS).
HBAR_CGS = 1.0545718e-27

#: Slack allowed on the Cauchy-Schwarz (positivity) inequalities of a
#: single-emitter density matrix.  Matches the tolerance class of the
#: default integrator settings.
POSITIVITY_TOL = 1e-9


class ParameterError(ValueError):
    """Base class for all input-validation failures."""


class NormalizationViolation(ParameterError):
    """Dipole ratios must satisfy mu21**2 + mu31**2 = 2 and be nonnegative."""


class NegativeLfc(ParameterError):
    """The local-field correction magnitude delta_L must be >= 0."""


class FilmTooThick(ParameterError):
    """k_c * L >= 1: the ultrathin-film (sub-wavelength) condition fails."""


class TraceViolation(ParameterError):
    """Populations do not add up to one."""


class PositivityViolation(ParameterError):
    """State violates positivity of the single-emitter density matrix."""


def _require_finite(name, value):
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class SystemParams:
    """Dimensionless parameters of the emitting film.

    omega32  doublet splitting omega3 - omega2, units of 1/tau_R
    delta_L  local-field (Lorentz) correction magnitude, units of 1/tau_R
    mu21     normalized dipole moment d21/d of the 2->1 transition
    mu31     normalized dipole moment d31/d of the 3->1 transition

    The normalization d = sqrt((d31**2 + d21**2)/2) forces
    mu21**2 + mu31**2 = 2.  Use :func:`make_params` to construct
    validated instances.
    """

    omega32: float
    delta_L: float
    mu21: float = 1.0
    mu31: float = 1.0


def make_params(omega32, delta_L, mu21=1.0, mu31=1.0) -> SystemParams:
    """Validate and build a :class:`SystemParams`.

    Raises NegativeLfc for delta_L < 0 and NormalizationViolation when the
    dipole ratios are negative or |mu21**2 + mu31**2 - 2| > 1e-9.
    """
    for name, value in (("omega32", omega32), ("delta_L", delta_L),
                        ("mu21", mu21), ("mu31", mu31)):
        _require_finite(name, value)
    if delta_L < 0:
        raise NegativeLfc(f"delta_L must be >= 0, got {delta_L}")
    if mu21 < 0 or mu31 < 0:
        raise NormalizationViolation(
            f"dipole ratios must be nonnegative, got mu21={mu21}, mu31={mu31}")
    norm = mu21 * mu21 + mu31 * mu31
    if abs(norm - 2.0) > 1e-9:
        raise NormalizationViolation(
            f"mu21**2 + mu31**2 = {norm!r}, expected 2 (within 1e-9)")
    return SystemParams(float(omega32), float(delta_L), float(mu21), float(mu31))


@dataclass(frozen=True)
class PhysicalInputs:
    """Laboratory-frame description of the film, CGS units.

    wavelength_c   central emission wavelength lambda_c (cm)
    thickness      film thickness L (cm); the ultrathin condition is
                   k_c * L = 2 pi L / lambda_c < 1
    dipole21       transition dipole moment d21 (statC cm)
    dipole31       transition dipole moment d31 (statC cm)
    concentration  emitter number density N0 (cm^-3)
    tau0           single-emitter spontaneous lifetime (s); used only by
                   :func:`estimate_timescales`

    Construction does not check the thin-film condition: the timescale
    estimator deliberately accepts thicker films, while
    :func:`derive_dimensionless` enforces k_c * L < 1.
    """

    wavelength_c: float
    thickness: float
    dipole21: float
    dipole31: float
    concentration: float
    tau0: float

    def __post_init__(self):
        for name in ("wavelength_c", "thickness", "dipole21", "dipole31",
                     "concentration", "tau0"):
            value = getattr(self, name)
            _require_finite(name, value)
            if value <= 0:
                raise ParameterError(f"{name} must be > 0, got {value}")

    @property
    def kc_L(self) -> float:
        """Dimensionless product k_c * L = 2 pi L / lambda_c."""
        return 2.0 * math.pi * self.thickness / self.wavelength_c

    @property
    def mean_dipole(self) -> float:
        """RMS dipole d = sqrt((d31**2 + d21**2)/2)."""
        return math.sqrt((self.dipole31 ** 2 + self.dipole21 ** 2) / 2.0)


def derive_dimensionless(phys: PhysicalInputs, omega32_rad_s: float = 0.0):
    """Convert physical film data to (SystemParams, tau_R in seconds).

    The collective time constant follows from
    1/tau_R = 2 pi k_c L d**2 N0 / hbar, and the local-field magnitude
    from Delta_L = 4 pi d**2 N0 / (3 hbar).  Their dimensionless product
    is therefore fixed by geometry alone:

        Delta_L * tau_R = 2 / (3 k_c L)

    which this routine satisfies exactly by construction.  The physical
    inputs carry no doublet splitting, so ``omega32_rad_s`` (angular
    frequency, rad/s) must be supplied separately when a nondegenerate
    doublet is wanted; it defaults to zero.

    Raises FilmTooThick when k_c * L >= 1.
    """
    kcl = phys.kc_L
    if kcl >= 1.0:
        raise FilmTooThick(
            f"k_c * L = {kcl:.4g} >= 1; not an ultrathin film")
    d2 = phys.mean_dipole ** 2
    tau_R = HBAR_CGS / (2.0 * math.pi * kcl * d2 * phys.concentration)
    delta_L = 2.0 / (3.0 * kcl)  # Delta_L in units of 1/tau_R, exact
    d = phys.mean_dipole
    params = make_params(omega32_rad_s * tau_R, delta_L,
                         phys.dipole21 / d, phys.dipole31 / d)
    return params, tau_R


def estimate_timescales(phys: PhysicalInputs) -> dict:
    """Estimate tau_R from single-emitter data.

    Uses tau_R = (8 pi / 3) (N0 lambda_c**3)**-1 (lambda_c / L) tau0,
    which trades the dipole moment for the measured spontaneous lifetime
    tau0.  Unlike :func:`derive_dimensionless` this estimator does not
    reject thick films (it is a scaling formula, not a model validity
    check).

    Returns {"tau_R_seconds": ..., "ratio_to_tau0": ...}.
    """
    tau_R = ((8.0 * math.pi / 3.0)
             / (phys.concentration * phys.wavelength_c ** 3)
             * (phys.wavelength_c / phys.thickness)
             * phys.tau0)
    return {"tau_R_seconds": tau_R, "ratio_to_tau0": tau_R / phys.tau0}


@dataclass(frozen=True)
class DensityState:
    """Single-instant state of the emitter ensemble (bare basis).

    R31, R21 are the slowly varying envelopes of the optical coherences
    rho31, rho21; rho32 is the low-frequency coherence between the
    doublet states (rho23 is its conjugate and never stored); rho11,
    rho22, rho33 are the level populations.
    """

    R31: complex
    R21: complex
    rho32: complex
    rho11: float
    rho22: float
    rho33: float

    def validate(self, tol: float = POSITIVITY_TOL) -> "DensityState":
        """Check trace, population bounds and positivity; return self.

        Safe to call repeatedly (idempotent).  Raises TraceViolation or
        PositivityViolation.
        """
        trace = self.rho11 + self.rho22 + self.rho33
        if abs(trace - 1.0) > 1e-9:
            raise TraceViolation(
                f"rho11 + rho22 + rho33 = {trace!r}, expected 1 (within 1e-9)")
        for name in ("rho11", "rho22", "rho33"):
            p = getattr(self, name)
            if p < -tol or p > 1.0 + tol:
                raise PositivityViolation(
                    f"population {name} = {p!r} outside [0, 1] (tol {tol})")
        checks = (
            ("|rho32|^2 <= rho22*rho33", abs(self.rho32) ** 2,
             self.rho22 * self.rho33),
            ("|R31|^2 <= rho33*rho11", abs(self.R31) ** 2,
             self.rho33 * self.rho11),
            ("|R21|^2 <= rho22*rho11", abs(self.R21) ** 2,
             self.rho22 * self.rho11),
        )
        for label, lhs, rhs in checks:
            if lhs > rhs + tol:
                raise PositivityViolation(
                    f"positivity {label} violated: {lhs!r} > {rhs!r} + {tol}")
        return self

    @property
    def trace(self) -> float:
        return self.rho11 + self.rho22 + self.rho33


def initial_state(rho22, rho33, rho32, R21_0=1e-8, R31_0=1e-8) -> DensityState:
    """Build a validated initial :class:`DensityState`.

    The ground-state population is implied: rho11 = 1 - rho22 - rho33.
    ``rho32``, ``R21_0`` and ``R31_0`` may be real or complex.

    Raises PositivityViolation for negative doublet populations or states
    breaking the Cauchy-Schwarz inequalities (e.g. |rho32|**2 >
    rho22*rho33), and TraceViolation when rho22 + rho33 > 1.
    """
    _require_finite("rho22", rho22)
    _require_finite("rho33", rho33)
    if rho22 < 0 or rho33 < 0:
        raise PositivityViolation(
            f"doublet populations must be >= 0, got rho22={rho22}, rho33={rho33}")
    occupied = rho22 + rho33
    if occupied > 1.0 + 1e-12:
        raise TraceViolation(
            f"rho22 + rho33 = {occupied!r} > 1: no room for the ground state")
    rho11 = max(1.0 - occupied, 0.0)
    state = DensityState(complex(R31_0), complex(R21_0), complex(rho32),
                         rho11, float(rho22), float(rho33))
    return state.validate()
