"""Bright/dark doublet basis: transforms and the equations of motion there.

The radiating (bright) and non-radiating (dark) superpositions of the
upper doublet are

    |+> = (mu21 |2> + mu31 |3>) / sqrt(2)
    |-> = (mu21 |3> - mu31 |2>) / sqrt(2)

which is unitary because the transition moments are normalised to
mu21^2 + mu31^2 = 2.  Only the bright coherence R_plus1 couples to the
field; the doublet splitting omega32 mixes the two channels.

Integrating in this basis is an independent consistency path: transform
the initial state, advance with :func:`rhs_bright_dark`, and map back.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import (IntegratorControl, Trajectory, _initial_step,
                       _integrate_core, _Monitors)
from .params import (POSITIVITY_TOL, DensityState, PositivityViolation,
                     SystemParams, TraceViolation)

__all__ = [
    "BrightDarkState",
    "BrightDarkDerivative",
    "to_bright_dark",
    "from_bright_dark",
    "rhs_bright_dark",
    "integrate_bright_dark",
]


@dataclass(frozen=True)
class BrightDarkState:
    """Density-matrix amplitudes in the bright/dark doublet basis."""

    R_plus1: complex
    R_minus1: complex
    rho_pm: complex
    rho_11: float
    rho_pp: float
    rho_mm: float

    def validate(self, tol: float = POSITIVITY_TOL) -> "BrightDarkState":
        """Trace and doublet positivity; returns self."""
        trace = self.rho_11 + self.rho_pp + self.rho_mm
        if abs(trace - 1.0) > 1e-9:
            raise TraceViolation(
                f"rho_11 + rho_pp + rho_mm = {trace!r}, expected 1")
        if abs(self.rho_pm) ** 2 > self.rho_pp * self.rho_mm + tol:
            raise PositivityViolation(
                f"|rho_pm|**2 = {abs(self.rho_pm) ** 2:.3e} exceeds "
                f"rho_pp*rho_mm = {self.rho_pp * self.rho_mm:.3e}")
        return self


@dataclass(frozen=True)
class BrightDarkDerivative:
    """Time derivative of a :class:`BrightDarkState` (units 1/tau_R)."""

    R_plus1: complex
    R_minus1: complex
    rho_pm: complex
    rho_11: float
    rho_pp: float
    rho_mm: float


def to_bright_dark(state: DensityState, params: SystemParams) -> BrightDarkState:
    """Rotate a bare-basis state into the bright/dark basis."""
    m21, m31 = params.mu21, params.mu31
    r22, r33, r32 = state.rho22, state.rho33, state.rho32
    rho_pp = 0.5 * (m21 ** 2 * r22 + m31 ** 2 * r33 + 2.0 * m21 * m31 * r32.real)
    rho_mm = 0.5 * (m21 ** 2 * r33 + m31 ** 2 * r22 - 2.0 * m21 * m31 * r32.real)
    rho_pm = 0.5 * (m21 * m31 * (r33 - r22)
                    + m21 ** 2 * r32.conjugate() - m31 ** 2 * r32)
    inv_s2 = 1.0 / np.sqrt(2.0)
    return BrightDarkState(
        R_plus1=(m21 * state.R21 + m31 * state.R31) * inv_s2,
        R_minus1=(m21 * state.R31 - m31 * state.R21) * inv_s2,
        rho_pm=rho_pm,
        rho_11=state.rho11,
        rho_pp=rho_pp,
        rho_mm=rho_mm,
    )


def from_bright_dark(bd: BrightDarkState, params: SystemParams) -> DensityState:
    """Rotate back to the bare basis (exact inverse of :func:`to_bright_dark`)."""
    m21, m31 = params.mu21, params.mu31
    a = m21 * m31
    b = 0.5 * (m21 ** 2 - m31 ** 2)
    s = bd.rho_pp + bd.rho_mm
    d1 = bd.rho_pp - bd.rho_mm
    d2 = bd.rho_pm.real
    u = b * d1 - 2.0 * a * d2          # rho22 - rho33
    re32 = 0.5 * a * d1 + b * d2
    inv_s2 = 1.0 / np.sqrt(2.0)
    return DensityState(
        R31=(m31 * bd.R_plus1 + m21 * bd.R_minus1) * inv_s2,
        R21=(m21 * bd.R_plus1 - m31 * bd.R_minus1) * inv_s2,
        rho32=complex(re32, -bd.rho_pm.imag),
        rho11=bd.rho_11,
        rho22=0.5 * (s + u),
        rho33=0.5 * (s - u),
    )


def _rhs_bd(y, omega32, delta_L, mu21, mu31):
    """Packed bright/dark vector field: [R+1, R-1, rho_pm, rho11, rho_pp, rho_mm]."""
    Rp = complex(y[0])
    Rm = complex(y[1])
    rpm = complex(y[2])
    r11 = y[3].real
    rpp = y[4].real
    rmm = y[5].real
    b2 = mu21 ** 2 - mu31 ** 2
    a = mu21 * mu31
    g = complex(1.0, -delta_L)
    dRp = (-0.25j * omega32 * (-b2 * Rp + 2.0 * a * Rm)
           + 2.0 * g * (rpp - r11) * Rp)
    dRm = (-0.25j * omega32 * (b2 * Rm + 2.0 * a * Rp)
           + 2.0 * g * Rp * rpm.conjugate())
    drpm = (0.5j * omega32 * (b2 * rpm + a * (rpp - rmm))
            + 2.0 * (-1.0 + 1j * delta_L) * Rp * Rm.conjugate())
    pump = 4.0 * (Rp * Rp.conjugate()).real      # d(rho11)/dt
    mix = omega32 * a * rpm.imag                 # doublet-splitting exchange
    drpp = -mix - pump
    drmm = mix
    dr11 = pump
    return np.array([dRp, dRm, drpm, dr11, drpp, drmm], dtype=complex)


def rhs_bright_dark(bd: BrightDarkState, params: SystemParams) -> BrightDarkDerivative:
    """Equations of motion expressed directly in the bright/dark basis.

    The bright channel pumps the ground state at rate 4|R_plus1|^2; the
    dark channel only moves via the omega32 mixing term and (for
    unbalanced moments) the coherence rho_pm.  This is the pushforward of
    the bare-basis vector field under the basis rotation.
    """
    y = np.array([bd.R_plus1, bd.R_minus1, bd.rho_pm,
                  bd.rho_11, bd.rho_pp, bd.rho_mm], dtype=complex)
    d = _rhs_bd(y, params.omega32, params.delta_L, params.mu21, params.mu31)
    return BrightDarkDerivative(d[0], d[1], d[2],
                                d[3].real, d[4].real, d[5].real)


def integrate_bright_dark(state0: DensityState, params: SystemParams,
                          t_end: float,
                          ctrl: IntegratorControl | None = None) -> Trajectory:
    """Advance the motion in the bright/dark basis; return bare-basis samples.

    Uses the same stepper, grid and monitors as :func:`dynamics.integrate`,
    so the two paths are directly comparable sample by sample.  The
    returned :class:`Trajectory` is already rotated back to the bare
    basis.
    """
    if t_end <= 0:
        raise ValueError(f"t_end must be > 0, got {t_end}")
    ctrl = (ctrl or IntegratorControl()).validated()
    state0.validate()
    bd0 = to_bright_dark(state0, params)
    y0 = np.array([bd0.R_plus1, bd0.R_minus1, bd0.rho_pm,
                   bd0.rho_11, bd0.rho_pp, bd0.rho_mm], dtype=complex)
    m21, m31 = params.mu21, params.mu31
    om, dl = params.omega32, params.delta_L

    def fun(t, y):
        return _rhs_bd(y, om, dl, m21, m31)

    def rate_of(y):
        return 4.0 * (complex(y[0]) * complex(y[0]).conjugate()).real

    # trace and the quadratic invariant are basis independent, so the
    # bare-state monitors apply verbatim to the packed bright/dark vector
    monitors = _Monitors(ctrl, y0, rate_of)
    t, y, acc, rej, stopped = _integrate_core(
        fun, y0, t_end, ctrl, _initial_step(om), monitors)

    bare = np.empty_like(y)
    for i in range(y.shape[1]):
        st = from_bright_dark(
            BrightDarkState(complex(y[0, i]), complex(y[1, i]),
                            complex(y[2, i]), y[3, i].real,
                            y[4, i].real, y[5, i].real), params)
        bare[:, i] = [st.R31, st.R21, st.rho32,
                      st.rho11, st.rho22, st.rho33]
    return Trajectory(t, bare, params, ctrl, acc, rej,
                      monitors.end_time if stopped else None)
