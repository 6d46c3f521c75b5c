"""Physical parameters, run configuration, case tables and the config file format.

Config files are flat ``key = value`` text, one assignment per line, ``#``
starts a comment.  Unknown keys and malformed lines are rejected.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path


class ConfigError(ValueError):
    """Malformed config text or a parameter that violates its invariant."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


@dataclass(frozen=True)
class Parameters:
    """Model constants in the units of the model (kg, m, s, K, kJ, kW)."""

    rho0: float = 40.0  # bulk density, kg/m^3
    C: float = 1.0  # specific heat, kJ/(kg K)
    A: float = 0.05  # pre-exponential factor, 1/s
    H: float = 4000.0  # heating value, kJ/kg
    h: float = 4.0  # convection coefficient, kW/(m^3 K)
    T_inf: float = 300.0  # ambient temperature, K
    T_pc: float = 400.0  # ignition temperature, K
    T_ac: float = 400.0  # activation temperature, K
    k: float = 2.0  # conductivity, kW/(m K)
    v: tuple[float, ...] = (0.0,)  # wind, m/s

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(float(c) for c in self.v))
        self.validate()

    def validate(self):
        for key in ("rho0", "C", "A", "H", "h", "T_inf", "T_pc", "T_ac", "k"):
            if not math.isfinite(getattr(self, key)):
                raise ConfigError(key, "must be finite")
        if self.rho0 <= 0:
            raise ConfigError("rho0", "must be > 0")
        if self.C <= 0:
            raise ConfigError("C", "must be > 0")
        for key in ("A", "H", "h", "k"):
            if getattr(self, key) < 0:
                raise ConfigError(key, "must be >= 0")
        if self.T_inf <= 0:
            raise ConfigError("T_inf", "must be > 0")
        if self.T_pc <= self.T_inf:
            raise ConfigError("T_pc", f"must exceed T_inf={self.T_inf}")
        if self.T_ac <= 0:
            raise ConfigError("T_ac", "must be > 0")
        if not 1 <= len(self.v) <= 2 or not all(math.isfinite(c) for c in self.v):
            raise ConfigError("v", "must have 1 or 2 finite components")

    def alpha(self) -> float:
        """Thermal diffusivity k/(rho0 C), m^2/s."""
        return self.k / (self.rho0 * self.C)

    def beta(self) -> float:
        """Ambient exchange rate h/(rho0 C), 1/s."""
        return self.h / (self.rho0 * self.C)

    def replace(self, **changes) -> Parameters:
        return dataclasses.replace(self, **changes)


def default_parameters() -> Parameters:
    return Parameters()


BOUNDARY_CONDITIONS = ("periodic", "transmissive")
WENO_ORDERS = (1, 3, 5, 7)


@dataclass(frozen=True)
class RunConfig:
    domain: tuple[tuple[float, float], ...] = ((0.0, 500.0),)
    t_final: float = 800.0
    cells: tuple[int, ...] = (2000,)
    cfl: float = 0.1
    weno_order: int = 7
    bc: str = "transmissive"
    output_dt: float = 150.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple((float(a), float(b)) for a, b in self.domain))
        object.__setattr__(self, "cells", tuple(int(n) for n in self.cells))
        self.validate()

    @property
    def ndim(self) -> int:
        return len(self.cells)

    def validate(self):
        if len(self.domain) != len(self.cells) or self.ndim not in (1, 2):
            raise ConfigError("nx", "domain and cell counts must both be 1D or 2D")
        for axis, (lo, hi) in zip("xy", self.domain):
            if not hi > lo:
                raise ConfigError(f"domain_{axis}1", "must exceed the lower extent")
        if not 0 < self.cfl <= 1:
            raise ConfigError("cfl", "must lie in (0, 1]")
        if self.weno_order not in WENO_ORDERS:
            raise ConfigError("weno_order", f"must be one of {WENO_ORDERS}")
        for axis, n in zip("xy", self.cells):
            if n < self.weno_order:
                raise ConfigError(f"n{axis}", f"must be >= weno_order={self.weno_order}")
        if self.bc not in BOUNDARY_CONDITIONS:
            raise ConfigError("bc", f"must be one of {BOUNDARY_CONDITIONS}")
        if not self.t_final >= 0:
            raise ConfigError("t_final", "must be >= 0")
        if not self.output_dt > 0:
            raise ConfigError("output_dt", "must be > 0")

    def replace(self, **changes) -> RunConfig:
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class CaseEntry:
    identifier: str
    parameter: str
    value: float


# Sub-case sweeps: heat exchange h, conductivity k, wind speed v.
CASE_TABLES: dict[str, tuple[str, tuple[float, ...]]] = {
    "A": ("h", (0.0, 0.025, 0.25, 1.0, 2.0, 4.0, 6.0)),
    "B": ("k", (0.125, 0.25, 0.5, 1.0, 2.0, 4.0)),
    "C": ("v", (0.00, 0.02, 0.04, 0.06, 0.08, 0.09, 0.1)),
}


def case_table(table: str) -> list[CaseEntry]:
    try:
        name, values = CASE_TABLES[table]
    except KeyError:
        raise KeyError(f"unknown case table {table!r}; expected one of {sorted(CASE_TABLES)}") from None
    return [CaseEntry(f"{table}-{i}", name, val) for i, val in enumerate(values, start=1)]


def case_suite(table: str, base: Parameters | None = None) -> list[tuple[str, Parameters]]:
    """Parameter sets of one case table, each overriding a single field of ``base``."""
    base = base or default_parameters()
    suite = []
    for entry in case_table(table):
        value = (entry.value,) if entry.parameter == "v" else entry.value
        suite.append((entry.identifier, base.replace(**{entry.parameter: value})))
    return suite


# ---------------------------------------------------------------------------
# key = value text format

PARAMETER_KEYS = ("rho0", "C", "A", "H", "h", "T_inf", "T_pc", "T_ac", "k", "vx", "vy")
RUN_KEYS = (
    "domain_x0", "domain_x1", "domain_y0", "domain_y1", "t_final", "nx", "ny",
    "cfl", "weno_order", "bc", "output_dt", "seed",
)
CONFIG_KEYS = PARAMETER_KEYS + RUN_KEYS
_INT_KEYS = {"nx", "ny", "weno_order", "seed"}


def parse_key_values(text: str, source: str = "<config>") -> dict[str, str]:
    """Split ``key = value`` lines into a dict of raw strings."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ConfigError(key or f"line {lineno}", f"malformed line {lineno} in {source}: {raw!r}")
        values[key] = value
    return values


def _coerce(key: str, raw: str):
    if key == "bc":
        return raw.lower()
    try:
        return int(raw) if key in _INT_KEYS else float(raw)
    except ValueError:
        raise ConfigError(key, f"cannot parse {raw!r} as {'integer' if key in _INT_KEYS else 'number'}") from None


def config_from_mapping(
    values: dict[str, str],
    base: tuple[Parameters, RunConfig] | None = None,
    allow_extra: bool = False,
) -> tuple[Parameters, RunConfig]:
    """Build validated (Parameters, RunConfig) from raw key strings over ``base``."""
    params, run = base or (default_parameters(), RunConfig())
    unknown = set(values) - set(CONFIG_KEYS)
    if unknown and not allow_extra:
        bad = sorted(unknown)[0]
        raise ConfigError(bad, "unknown key")
    typed = {key: _coerce(key, raw) for key, raw in values.items() if key in CONFIG_KEYS}

    p_kwargs = {key: typed[key] for key in PARAMETER_KEYS[:-2] if key in typed}
    v = list(params.v)
    if "vx" in typed:
        v[0] = typed["vx"]
    if "vy" in typed:
        v = (v + [0.0])[:2]
        v[1] = typed["vy"]

    domain = [list(ext) for ext in run.domain]
    cells = list(run.cells)
    if "ny" in typed or "domain_y0" in typed or "domain_y1" in typed:
        if len(cells) == 1:
            cells.append(cells[0])
            domain.append(list(domain[0]))
    for axis, name in enumerate("xy"):
        if axis >= len(cells):
            break
        if f"n{name}" in typed:
            cells[axis] = typed[f"n{name}"]
        for end in (0, 1):
            key = f"domain_{name}{end}"
            if key in typed:
                domain[axis][end] = typed[key]
    # 2D runs carry a 2-component wind; 1D runs a single component.
    v = tuple(v[: len(cells)]) if len(v) >= len(cells) else tuple(v + [0.0] * (len(cells) - len(v)))

    r_kwargs = {key: typed[key] for key in ("t_final", "cfl", "weno_order", "bc", "output_dt", "seed") if key in typed}
    new_params = params.replace(v=v, **p_kwargs)
    new_run = run.replace(domain=tuple(map(tuple, domain)), cells=tuple(cells), **r_kwargs)
    return new_params, new_run


def load_config(path, base: tuple[Parameters, RunConfig] | None = None) -> tuple[Parameters, RunConfig]:
    path = Path(path)
    return config_from_mapping(parse_key_values(path.read_text(), str(path)), base)


def config_to_mapping(params: Parameters, run: RunConfig) -> dict[str, object]:
    out: dict[str, object] = {key: getattr(params, key) for key in PARAMETER_KEYS[:-2]}
    out["vx"] = params.v[0]
    if len(params.v) > 1:
        out["vy"] = params.v[1]
    for axis, name in enumerate("xy"[: run.ndim]):
        out[f"domain_{name}0"], out[f"domain_{name}1"] = run.domain[axis]
        out[f"n{name}"] = run.cells[axis]
    out.update(t_final=run.t_final, cfl=run.cfl, weno_order=run.weno_order, bc=run.bc,
               output_dt=run.output_dt, seed=run.seed)
    return out


def format_value(value) -> str:
    # repr gives the shortest string that round-trips a float exactly
    return repr(value) if isinstance(value, float) else str(value)


def dump_config(params: Parameters, run: RunConfig, extra: dict[str, object] | None = None) -> str:
    lines = [f"{key} = {format_value(value)}" for key, value in config_to_mapping(params, run).items()]
    for key, value in (extra or {}).items():
        lines.append(f"{key} = {format_value(value)}")
    return "\n".join(lines) + "\n"


def apply_overrides(params: Parameters, run: RunConfig, overrides: list[str]) -> tuple[Parameters, RunConfig]:
    """Apply ``key=value`` strings (CLI ``--set``) on top of an existing config."""
    values = parse_key_values("\n".join(overrides), "--set")
    return config_from_mapping(values, (params, run))


@dataclass(frozen=True)
class SchemeConfig:
    weno_order: int = 7
    cfl: float = 0.1
    weno_epsilon: float = 1e-6
    ignition_timing: bool = True  # sub-step ignition instant in the closing reaction stage

    def __post_init__(self):
        if self.weno_order not in WENO_ORDERS:
            raise ConfigError("weno_order", f"must be one of {WENO_ORDERS}")
        if not 0 < self.cfl <= 1:
            raise ConfigError("cfl", "must lie in (0, 1]")
        if not self.weno_epsilon > 0:
            raise ConfigError("weno_epsilon", "must be > 0")

    @classmethod
    def from_run(cls, run: RunConfig, **kw) -> SchemeConfig:
        return cls(weno_order=run.weno_order, cfl=run.cfl, **kw)


__all__ = [
    "BOUNDARY_CONDITIONS", "CASE_TABLES", "CaseEntry", "ConfigError", "Parameters", "RunConfig",
    "SchemeConfig", "WENO_ORDERS", "apply_overrides", "case_suite", "case_table", "config_from_mapping",
    "config_to_mapping", "default_parameters", "dump_config", "load_config", "parse_key_values",
]
