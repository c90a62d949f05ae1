"""Scenario configuration: plain-text configs, presets, and sweep specs.

Config files are UTF-8 ``key = value`` lines with dotted section prefixes
and ``#`` comments, for example::

    # coherent preparation
    params.omega32 = 5.0
    params.delta_L = 0.0
    init.rho22 = 0.5
    init.rho33 = 0.5
    init.rho32 = 0.5
    run.t_end = 40.0

Unknown keys are rejected rather than ignored, so a typo cannot silently
run the wrong scenario.  Complex values use Python literal syntax
without spaces (``0.5``, ``1e-8j``, ``0.3+0.1j``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from importlib import resources

from .dynamics import IntegratorControl
from .params import (DensityState, ParameterError, PhysicalInputs,
                     SystemParams, initial_state, make_params)

__all__ = [
    "ConfigError",
    "InitialSpec",
    "ScenarioConfig",
    "SweepSpec",
    "PRESET_NAMES",
    "SWEEPABLE",
    "parse_config",
    "scenario_from_mapping",
    "load_scenario",
    "load_preset",
    "physical_from_mapping",
    "load_physical",
    "apply_sweep_value",
]

PRESET_NAMES = ("fig2", "fig3", "fig4", "fig5", "degenerate")
SWEEPABLE = ("delta_L", "omega32", "rho32_0")

# the output grid must resolve the fastest phase evolution, whether it
# comes from the doublet splitting or from the local-field chirp
_GRID_SAFETY = 0.01


class ConfigError(ParameterError):
    """Malformed or inconsistent configuration input."""


@dataclass(frozen=True)
class InitialSpec:
    """Initial-state quintuple as read from a config."""

    rho22: float
    rho33: float
    rho32: complex = 0.0
    R21: complex = 1e-8
    R31: complex = 1e-8

    def build(self) -> DensityState:
        return initial_state(self.rho22, self.rho33, self.rho32,
                             self.R21, self.R31)


@dataclass(frozen=True)
class ScenarioConfig:
    """One fully specified run: parameters, initial state, controls."""

    params: SystemParams
    init: InitialSpec
    t_end: float
    control: IntegratorControl = IntegratorControl()
    out_dir: str | None = None

    def initial_state(self) -> DensityState:
        return self.init.build()

    def validated(self) -> "ScenarioConfig":
        """Check cross-field consistency (raises ConfigError)."""
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ConfigError(f"run.t_end must be finite and > 0, "
                              f"got {self.t_end!r}")
        try:
            self.control.validated()
            state = self.init.build()
        except (ParameterError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        # phase-unwrap safety: the grid must beat both the doublet
        # splitting and the maximum local-field chirp 4*Z0*delta_L
        from .analytics import inversion_condition
        z0 = inversion_condition(state, self.params)["Z0"]
        fastest = max(abs(self.params.omega32),
                      4.0 * max(z0, 0.0) * self.params.delta_L, 1.0)
        bound = _GRID_SAFETY * 2.0 * math.pi / fastest
        if self.control.dt > bound * (1.0 + 1e-12):
            raise ConfigError(
                f"run.dt = {self.control.dt:g} too coarse for the fastest "
                f"phase scale; need dt <= {bound:.4g}")
        return self


@dataclass(frozen=True)
class SweepSpec:
    """A family of runs varying one parameter of a base scenario."""

    base: ScenarioConfig
    param: str
    values: tuple[float, ...]
    threads: int | None = None

    def validated(self) -> "SweepSpec":
        if self.param not in SWEEPABLE:
            raise ConfigError(
                f"sweep parameter must be one of {SWEEPABLE}, "
                f"got {self.param!r}")
        if len(self.values) == 0:
            raise ConfigError("sweep needs at least one value")
        if not all(math.isfinite(v) for v in self.values):
            raise ConfigError(f"sweep values must be finite: {self.values}")
        if self.threads is not None and self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads!r}")
        self.base.validated()
        for v in self.values:
            try:
                apply_sweep_value(self.base, self.param, v).validated()
            except ParameterError as exc:
                if isinstance(exc, ConfigError):
                    raise
                raise ConfigError(
                    f"sweep value {v!r} is invalid: {exc}") from exc
        return self


def apply_sweep_value(base: ScenarioConfig, param: str,
                      value: float) -> ScenarioConfig:
    """Base scenario with one swept parameter replaced (and re-checked)."""
    p = base.params
    if param == "delta_L":
        return replace(base, params=make_params(p.omega32, value,
                                                p.mu21, p.mu31))
    if param == "omega32":
        return replace(base, params=make_params(value, p.delta_L,
                                                p.mu21, p.mu31))
    if param == "rho32_0":
        return replace(base, init=replace(base.init, rho32=complex(value)))
    raise ConfigError(f"unknown sweep parameter {param!r}")


# ---------------------------------------------------------------------
# parsing

def parse_config(text: str) -> dict[str, str]:
    """``key = value`` lines to a flat mapping; '#' starts a comment."""
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', "
                              f"got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in mapping:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        mapping[key] = value
    return mapping


def _take(mapping, converters, key, kind, default=None, required=False):
    if key not in mapping:
        if required:
            raise ConfigError(f"missing required key {key!r}")
        return default
    raw = mapping.pop(key)
    try:
        return converters[kind](raw)
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: cannot read {raw!r} as {kind}") from exc


def _to_bool(raw: str) -> bool:
    low = raw.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(raw)


_CONVERTERS = {"float": float, "complex": complex, "bool": _to_bool,
               "str": str}


def scenario_from_mapping(mapping: dict[str, str]) -> ScenarioConfig:
    """Build and validate a :class:`ScenarioConfig` from parsed keys."""
    m = dict(mapping)
    take = lambda *a, **k: _take(m, _CONVERTERS, *a, **k)
    try:
        params = make_params(
            omega32=take("params.omega32", "float", required=True),
            delta_L=take("params.delta_L", "float", required=True),
            mu21=take("params.mu21", "float", default=1.0),
            mu31=take("params.mu31", "float", default=1.0),
        )
    except ParameterError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    init = InitialSpec(
        rho22=take("init.rho22", "float", required=True),
        rho33=take("init.rho33", "float", required=True),
        rho32=take("init.rho32", "complex", default=0j),
        R21=take("init.R21", "complex", default=1e-8 + 0j),
        R31=take("init.R31", "complex", default=1e-8 + 0j),
    )
    defaults = IntegratorControl()
    control = IntegratorControl(
        rel_tol=take("run.rel_tol", "float", default=defaults.rel_tol),
        abs_tol=take("run.abs_tol", "float", default=defaults.abs_tol),
        invariant_tol=take("run.invariant_tol", "float",
                           default=defaults.invariant_tol),
        dt=take("run.dt", "float", default=defaults.dt),
        stop_on_quiescence=take("run.stop_on_quiescence", "bool",
                                default=defaults.stop_on_quiescence),
    )
    cfg = ScenarioConfig(
        params=params,
        init=init,
        t_end=take("run.t_end", "float", required=True),
        control=control,
        out_dir=take("output.dir", "str"),
    )
    if m:
        raise ConfigError(f"unknown config keys: {sorted(m)}")
    return cfg.validated()


def physical_from_mapping(mapping: dict[str, str]) -> PhysicalInputs:
    """Build :class:`PhysicalInputs` (CGS units) from parsed keys."""
    m = dict(mapping)
    take = lambda *a, **k: _take(m, _CONVERTERS, *a, **k)
    try:
        phys = PhysicalInputs(
            wavelength_c=take("physical.wavelength_c", "float", required=True),
            thickness=take("physical.thickness", "float", required=True),
            dipole21=take("physical.dipole21", "float", required=True),
            dipole31=take("physical.dipole31", "float", required=True),
            concentration=take("physical.concentration", "float",
                               required=True),
            tau0=take("physical.tau0", "float", required=True),
        )
    except ParameterError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    if m:
        raise ConfigError(f"unknown config keys: {sorted(m)}")
    return phys


def load_scenario(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as handle:
        return scenario_from_mapping(parse_config(handle.read()))


def load_physical(path) -> PhysicalInputs:
    with open(path, encoding="utf-8") as handle:
        return physical_from_mapping(parse_config(handle.read()))


def load_preset(name: str) -> ScenarioConfig:
    """One of the shipped scenarios: fig2, fig3, fig4, fig5, degenerate."""
    if name not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {name!r}; "
                          f"choose from {PRESET_NAMES}")
    text = (resources.files("filmsr") / "presets" / f"{name}.cfg").read_text(
        encoding="utf-8")
    return scenario_from_mapping(parse_config(text))
