"""RWA equations of motion, field reconstruction, and the time integrator.

The state vector handed to the stepper packs the six independent
density-matrix amplitudes as complex numbers, in the order

    [R31, R21, rho32, rho11, rho22, rho33]

with the populations carried in the real parts of the last three slots.
The population derivatives are written as explicit real parts, so the
imaginary parts of those slots stay exactly zero along a trajectory.

Time is in units of tau_R throughout (tau_R = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import DensityState, SystemParams, TraceViolation

__all__ = [
    "IntegrationError",
    "StepSizeUnderflow",
    "InvariantDrift",
    "StateDerivative",
    "FieldSample",
    "IntegratorControl",
    "Trajectory",
    "rhs_original",
    "field_of",
    "integrate",
]


class IntegrationError(RuntimeError):
    """Base class for failures while advancing the equations of motion."""


class StepSizeUnderflow(IntegrationError):
    """The controller pushed the step below the resolvable floor."""


class InvariantDrift(IntegrationError):
    """Trace or quadratic invariant drifted beyond the configured bound."""


@dataclass(frozen=True)
class StateDerivative:
    """Time derivative of a :class:`DensityState` (units 1/tau_R)."""

    R31: complex
    R21: complex
    rho32: complex
    rho11: float
    rho22: float
    rho33: float


@dataclass(frozen=True)
class FieldSample:
    """Radiated and acting field envelopes at one instant.

    emitted_amp  mu21*R21 + mu31*R31, the slowly varying envelope of the
                 field emitted by the film
    acting_amp   (i + delta_L) * emitted_amp, the envelope of the field
                 acting on an emitter (Maxwell field plus the Lorentz
                 local-field term)
    """

    emitted_amp: complex
    acting_amp: complex


@dataclass(frozen=True)
class IntegratorControl:
    """Knobs of the adaptive stepper.

    rel_tol / abs_tol    embedded-pair error control (per component)
    invariant_tol        allowed drift of trace and quadratic invariant
    dt                   output grid spacing (time units of tau_R);
                         accepted steps never straddle a grid point, so
                         grid samples are integration nodes and linear
                         interpolation between samples is exact there
    stop_on_quiescence   end the run early once emission is over:
                         d(rho11)/dt < quiescence_rate sustained over a
                         window of quiescence_window, evaluated only
                         after the rate has exceeded the threshold at
                         least once (otherwise an undeveloped pulse
                         would stop the run during its quiet rise)
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    invariant_tol: float = 1e-8
    dt: float = 0.01
    stop_on_quiescence: bool = True
    quiescence_rate: float = 1e-8
    quiescence_window: float = 10.0
    max_steps: int = 20_000_000

    def validated(self) -> "IntegratorControl":
        if not 1e-13 <= self.rel_tol <= 1e-6:
            raise ValueError(
                f"rel_tol must lie in [1e-13, 1e-6], got {self.rel_tol!r}")
        if self.abs_tol <= 0 or self.dt <= 0 or self.invariant_tol <= 0:
            raise ValueError("abs_tol, dt and invariant_tol must be > 0")
        return self


def _rhs(y, omega32, delta_L, mu21, mu31):
    """Vector field for the packed state; plain-complex arithmetic for speed."""
    R31 = complex(y[0])
    R21 = complex(y[1])
    r32 = complex(y[2])
    r11 = y[3].real
    r22 = y[4].real
    r33 = y[5].real
    g = complex(1.0, -delta_L)           # 1/tau_R - i*delta_L
    S = mu21 * R21 + mu31 * R31          # emitted-field envelope
    Sc = S.conjugate()
    dR31 = -0.5j * omega32 * R31 + g * (mu31 * (r33 - r11) + mu21 * r32) * S
    dR21 = (0.5j * omega32 * R21
            + g * (mu21 * (r22 - r11) + mu31 * r32.conjugate()) * S)
    dr32 = (-1j * omega32 * r32
            - (g.conjugate() * mu21 * R31 * Sc
               + g * mu31 * R21.conjugate() * S))
    dr33 = 2.0 * mu31 * ((-1.0 + 1j * delta_L) * S * R31.conjugate()).real
    dr22 = 2.0 * mu21 * ((-1.0 + 1j * delta_L) * S * R21.conjugate()).real
    dr11 = 2.0 * (S * Sc).real
    return np.array([dR31, dR21, dr32, dr11, dr22, dr33], dtype=complex)


def rhs_original(state: DensityState, params: SystemParams) -> StateDerivative:
    """Right-hand side of the RWA equations in the bare basis.

    The ground-state filling rate is a modulus squared,
    d(rho11)/dt = 2 |mu21 R21 + mu31 R31|**2 >= 0, so rho11 never
    decreases; the population derivatives add to zero exactly.
    """
    y = _pack(state)
    d = _rhs(y, params.omega32, params.delta_L, params.mu21, params.mu31)
    return StateDerivative(d[0], d[1], d[2], d[3].real, d[4].real, d[5].real)


def field_of(state: DensityState, params: SystemParams) -> FieldSample:
    """Emitted and acting field envelopes for one state."""
    emitted = params.mu21 * state.R21 + params.mu31 * state.R31
    return FieldSample(emitted, (1j + params.delta_L) * emitted)


def _pack(state: DensityState) -> np.ndarray:
    return np.array([state.R31, state.R21, state.rho32,
                     state.rho11, state.rho22, state.rho33], dtype=complex)


def _unpack(y) -> DensityState:
    return DensityState(complex(y[0]), complex(y[1]), complex(y[2]),
                        y[3].real, y[4].real, y[5].real)


@dataclass(frozen=True)
class Trajectory:
    """Grid-sampled solution of one integration.

    t        sample times, strictly increasing, spacing ``control.dt``
    y        complex array of shape (6, len(t)) in packed order
    params   the :class:`SystemParams` the run used
    control  the :class:`IntegratorControl` the run used
    steps_accepted / steps_rejected
             adaptive-stepper bookkeeping
    end_of_run_time
             time at which the quiescence detector ended the run, or
             None when the run reached t_end
    """

    t: np.ndarray
    y: np.ndarray
    params: SystemParams
    control: IntegratorControl
    steps_accepted: int
    steps_rejected: int
    end_of_run_time: float | None = None

    # -- component views -------------------------------------------------
    @property
    def R31(self):
        return self.y[0]

    @property
    def R21(self):
        return self.y[1]

    @property
    def rho32(self):
        return self.y[2]

    @property
    def rho11(self):
        return self.y[3].real

    @property
    def rho22(self):
        return self.y[4].real

    @property
    def rho33(self):
        return self.y[5].real

    @property
    def emitted_amp(self):
        return self.params.mu21 * self.y[1] + self.params.mu31 * self.y[0]

    @property
    def acting_amp(self):
        return (1j + self.params.delta_L) * self.emitted_amp

    def state_at(self, i: int) -> DensityState:
        return _unpack(self.y[:, i])

    def field_at(self, i: int) -> FieldSample:
        return field_of(self.state_at(i), self.params)

    def sample(self, time: float) -> DensityState:
        """Dense output: linear interpolation between stored samples."""
        t = self.t
        if not t[0] <= time <= t[-1]:
            raise ValueError(f"t={time} outside [{t[0]}, {t[-1]}]")
        i = int(np.searchsorted(t, time, side="right")) - 1
        if i >= len(t) - 1:
            return self.state_at(len(t) - 1)
        w = (time - t[i]) / (t[i + 1] - t[i])
        return _unpack((1.0 - w) * self.y[:, i] + w * self.y[:, i + 1])

    def validate(self) -> "Trajectory":
        """Structural checks over all samples; returns self.

        Times strictly increasing, trace within 1e-9 everywhere, and
        every sample a valid density state (positivity included).
        """
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        trace = self.rho11 + self.rho22 + self.rho33
        err = np.max(np.abs(trace - 1.0))
        if err > 1e-9:
            raise TraceViolation(
                f"trace deviates from 1 by {err:.3e} along the trajectory")
        for i in range(self.t.size):
            self.state_at(i).validate()
        return self


# Dormand-Prince 5(4) coefficients.  The pair is FSAL: the last stage of
# an accepted step is the first stage of the next one.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = _B5 - np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                     -92097 / 339200, 187 / 2100, 1 / 40])

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


def _initial_step(omega32: float) -> float:
    """Conservative first step: a small fraction of the fastest period."""
    return 1e-3 * min(2.0 * math.pi / max(abs(omega32), 1.0), 1.0)


def _integrate_core(fun, y0, t_end, ctrl: IntegratorControl, h0: float,
                    sample_hook=None):
    """Adaptive DP5(4) driver producing samples on the regular dt grid.

    ``fun(t, y) -> dy`` works on packed complex vectors.  Steps are
    clamped so they end exactly on the next grid point whenever they
    would cross it; every stored sample is therefore an integration node.

    ``sample_hook(t, y) -> bool`` is called at each grid sample (not at
    t=0); returning True ends the run at that sample.  Invariant
    monitoring and quiescence detection are implemented as hooks by the
    callers.

    Returns (t_array, y_array, accepted, rejected, stopped_early).
    """
    dt = ctrl.dt
    n_grid = int(round(t_end / dt))
    if abs(n_grid * dt - t_end) > 1e-9 * max(1.0, t_end):
        # keep the final partial interval; sampling stays on the dt comb
        n_grid = int(math.floor(t_end / dt + 1e-12))
    grid = dt * np.arange(1, n_grid + 1)
    if n_grid == 0 or grid[-1] < t_end - 1e-12:
        grid = np.append(grid, t_end)

    ts = [0.0]
    ys = [np.array(y0, dtype=complex)]
    t = 0.0
    y = np.array(y0, dtype=complex)
    k1 = fun(t, y)
    h = min(h0, grid[0])
    accepted = rejected = 0
    stopped = False
    K = np.empty((7, y.size), dtype=complex)

    for target in grid:
        while t < target - 1e-12 * max(1.0, target):
            h = min(h, target - t)
            if h < 1e-14 * max(1.0, t):
                raise StepSizeUnderflow(
                    f"step {h:.3e} underflowed at t={t:.6g}")
            if accepted + rejected > ctrl.max_steps:
                raise IntegrationError("step budget exhausted")

            K[0] = k1
            for i in range(1, 7):
                yi = y + h * (_A[i] @ K[:i])
                K[i] = fun(t + _C[i] * h, yi)
            y_new = y + h * (_B5 @ K)
            # K[6] was evaluated at (t+h, y_new): FSAL
            err_vec = h * (_E @ K)
            scale = ctrl.abs_tol + ctrl.rel_tol * np.maximum(np.abs(y),
                                                             np.abs(y_new))
            err = math.sqrt(float(np.mean(np.abs(err_vec / scale) ** 2)))

            if err <= 1.0:
                t_new = t + h
                # land exactly on the grid point when this step reaches it
                if t_new >= target - 1e-12 * max(1.0, target):
                    t_new = target
                t, y, k1 = t_new, y_new, K[6]
                accepted += 1
                factor = (_MAX_FACTOR if err == 0.0
                          else min(_MAX_FACTOR, _SAFETY * err ** -0.2))
                h *= max(_MIN_FACTOR, factor)
            else:
                rejected += 1
                h *= max(_MIN_FACTOR, _SAFETY * err ** -0.2)

        ts.append(t)
        ys.append(y.copy())
        if sample_hook is not None and sample_hook(t, y):
            stopped = True
            break

    return (np.array(ts), np.array(ys).T, accepted, rejected, stopped)


def _quadratic(y) -> float:
    """rho11^2 + rho22^2 + rho33^2 + 2(|rho32|^2 + |R31|^2 + |R21|^2)."""
    return (y[3].real ** 2 + y[4].real ** 2 + y[5].real ** 2
            + 2.0 * (abs(y[2]) ** 2 + abs(y[0]) ** 2 + abs(y[1]) ** 2))


class _Monitors:
    """Per-sample invariant check and quiescence detector (packed bare state)."""

    def __init__(self, ctrl, y0, rate_of):
        self.ctrl = ctrl
        self.trace0 = y0[3].real + y0[4].real + y0[5].real
        self.quad0 = _quadratic(y0)
        self.rate_of = rate_of
        self.armed = False
        self.last_loud = 0.0
        self.end_time = None

    def __call__(self, t, y) -> bool:
        ctrl = self.ctrl
        trace = y[3].real + y[4].real + y[5].real
        if abs(trace - self.trace0) > ctrl.invariant_tol:
            raise InvariantDrift(
                f"trace drifted by {abs(trace - self.trace0):.3e} at t={t:.4g} "
                f"(limit {ctrl.invariant_tol:g})")
        quad = _quadratic(y)
        if abs(quad - self.quad0) > ctrl.invariant_tol:
            raise InvariantDrift(
                f"quadratic invariant drifted by {abs(quad - self.quad0):.3e} "
                f"at t={t:.4g} (limit {ctrl.invariant_tol:g})")
        if not ctrl.stop_on_quiescence:
            return False
        if self.rate_of(y) >= ctrl.quiescence_rate:
            self.armed = True
            self.last_loud = t
        elif self.armed and t - self.last_loud >= ctrl.quiescence_window:
            self.end_time = t
            return True
        return False


def integrate(state0: DensityState, params: SystemParams, t_end: float,
              ctrl: IntegratorControl | None = None) -> Trajectory:
    """Advance the RWA equations from ``state0`` to ``t_end``.

    Adaptive embedded Runge-Kutta 4(5); the trajectory is sampled on the
    regular grid ``ctrl.dt`` and each sample is an integration node (see
    :class:`IntegratorControl`).  Trace and the quadratic invariant are
    monitored at every sample; drift beyond ``ctrl.invariant_tol`` raises
    :class:`InvariantDrift`.  With ``stop_on_quiescence`` the run ends
    once d(rho11)/dt has stayed below 1e-8 for 10 tau_R after emission
    developed, which is what "final" populations refer to.
    """
    if t_end <= 0:
        raise ValueError(f"t_end must be > 0, got {t_end}")
    ctrl = (ctrl or IntegratorControl()).validated()
    state0.validate()
    y0 = _pack(state0)
    mu21, mu31 = params.mu21, params.mu31
    om, dl = params.omega32, params.delta_L

    def fun(t, y):
        return _rhs(y, om, dl, mu21, mu31)

    def rate_of(y):
        s = mu21 * complex(y[1]) + mu31 * complex(y[0])
        return 2.0 * (s * s.conjugate()).real

    monitors = _Monitors(ctrl, y0, rate_of)
    t, y, acc, rej, stopped = _integrate_core(
        fun, y0, t_end, ctrl, _initial_step(om), monitors)
    return Trajectory(t, y, params, ctrl, acc, rej,
                      monitors.end_time if stopped else None)
