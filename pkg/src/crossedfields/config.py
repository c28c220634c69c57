"""Run configuration: line-oriented ``key = value`` files with unit suffixes.

Dimensioned values carry a unit token (``B = 5 T``, ``E_F = 0.868 meV``,
``tau = 1e-11 s``); energies accept J, eV or meV, masses kg or m_e.  The
canonical echo emitted into every output file parses back to an identical
configuration, which makes runs reproducible from their own artifacts.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Optional

from .constants import ELECTRON_MASS, ELEMENTARY_CHARGE
from .dos import FieldConfiguration
from .errors import ParseError, ValidationError
from .transport import MaterialParams

__all__ = ["SweepSpec", "RunConfig", "parse_config", "canonical_echo"]

SWEEP_VARIABLES = ("energy", "B", "E_perp")
OUTPUT_TOKENS = ("dos", "idos", "sigma", "rho", "E_y", "plateaus")

_UNITS = {
    "tesla": {"T": 1.0},
    "efield": {"V/m": 1.0},
    "mass": {"kg": 1.0, "m_e": ELECTRON_MASS},
    "energy": {"J": 1.0, "eV": ELEMENTARY_CHARGE, "meV": 1e-3 * ELEMENTARY_CHARGE},
    "time": {"s": 1.0},
    "temperature": {"K": 1.0},
    "current_density": {"A/m": 1.0},
    "dimensionless": {},
}

# key -> (kind, echo unit); kinds "token", "token_list", "int", "float",
# "string" and the dimensioned kinds above; "sweep" resolves its unit from
# the sweep variable
_KEYS = {
    "B": ("tesla", "T"),
    "E_perp": ("efield", "V/m"),
    "E_perp_list": ("efield_list", "V/m"),
    "m_eff": ("mass", "kg"),
    "g_factor": ("dimensionless", None),
    "E_F": ("energy", "J"),
    "tau": ("time", "s"),
    "temperature": ("temperature", "K"),
    "j_x": ("current_density", "A/m"),
    "variable": ("token", None),
    "start": ("sweep", None),
    "stop": ("sweep", None),
    "points": ("int", None),
    "outputs": ("token_list", None),
    "quad_tol": ("dimensionless", None),
    "fp_rtol": ("dimensionless", None),
    "fp_atol": ("dimensionless", None),
    "k_cap": ("int", None),
    "out_dir": ("string", None),
}

_SWEEP_KIND = {"energy": "energy", "B": "tesla", "E_perp": "efield"}
_SWEEP_UNIT = {"energy": "J", "B": "T", "E_perp": "V/m"}


@dataclass(frozen=True)
class SweepSpec:
    """One swept variable over [start, stop] with a fixed point count."""

    variable: str
    start: float
    stop: float
    points: int
    outputs: tuple = ("dos", "idos")

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValidationError(
                f"sweep variable must be one of {SWEEP_VARIABLES}, got {self.variable!r}")
        if not self.start < self.stop:
            raise ValidationError(
                f"sweep requires start < stop, got [{self.start}, {self.stop}]")
        if self.points < 2:
            raise ValidationError(f"sweep requires points >= 2, got {self.points}")
        bad = [t for t in self.outputs if t not in OUTPUT_TOKENS]
        if bad:
            raise ValidationError(f"unknown output selection {bad}, allowed {OUTPUT_TOKENS}")


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration for one CLI run."""

    B: Optional[float] = None
    E_perp: Optional[float] = None
    E_perp_list: Optional[tuple] = None
    m_eff: float = ELECTRON_MASS
    g_factor: float = 0.0
    E_F: Optional[float] = None
    tau: Optional[float] = None
    temperature: float = 0.0
    j_x: float = 0.0
    sweep: Optional[SweepSpec] = None
    quad_tol: float = 1e-9
    fp_rtol: float = 1e-9
    fp_atol: float = 1e-6       # V/m
    k_cap: int = 10_000
    out_dir: str = "."

    def __post_init__(self):
        for name in ("quad_tol", "fp_rtol", "fp_atol"):
            if not getattr(self, name) > 0.0:
                raise ValidationError(f"{name} must be positive")
        if self.k_cap < 0:
            raise ValidationError("k_cap must be non-negative")
        variable = self.sweep.variable if self.sweep else "energy"
        if variable != "B" and self.B is None:
            raise ValidationError(
                "crossed-field runs need the magnetic field: set B (or sweep it)")

    def field_config(self, B: Optional[float] = None,
                     E_perp: Optional[float] = None) -> FieldConfiguration:
        b = B if B is not None else self.B
        if b is None:
            raise ValidationError("no magnetic field available for this operation")
        e = E_perp if E_perp is not None else (self.E_perp or 0.0)
        return FieldConfiguration(B=b, E_perp=e, m_eff=self.m_eff,
                                  g_factor=self.g_factor)

    def material(self) -> MaterialParams:
        missing = [k for k in ("E_F", "tau") if getattr(self, k) is None]
        if missing:
            raise ValidationError(f"transport runs need {missing} to be set")
        return MaterialParams(tau_EF=self.tau, temperature=self.temperature,
                              j_x=self.j_x, E_F=self.E_F)


def _parse_number(text: str, line_no: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"cannot parse number {text!r}", line_no) from None


def _split_unit(value: str):
    parts = value.rsplit(None, 1)
    if len(parts) == 2 and not parts[1][0].isdigit() and parts[1][0] not in "+-.":
        return parts[0], parts[1]
    return value, None


def _convert(kind: str, value: str, unit: Optional[str], line_no: int) -> float:
    table = _UNITS[kind]
    if kind == "dimensionless":
        if unit is not None:
            raise ParseError(f"dimensionless value carries unit {unit!r}", line_no)
        return _parse_number(value, line_no)
    if unit is None:
        raise ParseError(
            f"missing unit (expected one of {sorted(table)})", line_no)
    if unit not in table:
        raise ParseError(
            f"unknown unit {unit!r} (expected one of {sorted(table)})", line_no)
    return _parse_number(value, line_no) * table[unit]


def parse_config(text: str) -> RunConfig:
    """Parse a ``key = value`` document into a validated RunConfig.

    Raises ParseError (with line number) on malformed text and
    ValidationError when a parsed value violates an invariant.
    """
    raw: dict[str, tuple[str, int]] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ParseError("expected 'key = value'", line_no)
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KEYS:
            raise ParseError(f"unknown key {key!r}", line_no)
        if key in raw:
            raise ParseError(f"duplicate key {key!r}", line_no)
        if not value:
            raise ParseError(f"empty value for {key!r}", line_no)
        raw[key] = (value, line_no)

    variable = raw.get("variable", ("energy", 0))[0]

    values: dict[str, object] = {}
    for key, (value, line_no) in raw.items():
        kind, _ = _KEYS[key]
        if kind == "token":
            values[key] = value
        elif kind == "string":
            values[key] = value
        elif kind == "int":
            num = _parse_number(value, line_no)
            if num != int(num):
                raise ParseError(f"{key} must be an integer", line_no)
            values[key] = int(num)
        elif kind == "token_list":
            values[key] = tuple(t.strip() for t in value.split(",") if t.strip())
        elif kind == "efield_list":
            body, unit = _split_unit(value)
            values[key] = tuple(
                _convert("efield", item.strip(), unit, line_no)
                for item in body.split(",") if item.strip())
        elif kind == "sweep":
            if variable not in _SWEEP_KIND:
                raise ValidationError(
                    f"sweep variable must be one of {SWEEP_VARIABLES}, got {variable!r}")
            body, unit = _split_unit(value)
            values[key] = _convert(_SWEEP_KIND[variable], body, unit, line_no)
        else:
            body, unit = _split_unit(value)
            values[key] = _convert(kind, body, unit, line_no)

    # sweep-key invariants hold even when no full sweep is being defined
    if variable not in SWEEP_VARIABLES:
        raise ValidationError(
            f"sweep variable must be one of {SWEEP_VARIABLES}, got {variable!r}")
    if "points" in values and values["points"] < 2:
        raise ValidationError(f"sweep requires points >= 2, got {values['points']}")
    if "outputs" in values:
        bad = [t for t in values["outputs"] if t not in OUTPUT_TOKENS]
        if bad:
            raise ValidationError(f"unknown output selection {bad}, allowed {OUTPUT_TOKENS}")

    sweep = None
    if ("start" in values) != ("stop" in values):
        raise ValidationError("a sweep needs both start and stop")
    if "start" in values:
        sweep = SweepSpec(
            variable=variable,
            start=values.pop("start"),
            stop=values.pop("stop"),
            points=values.pop("points", 4000),
            outputs=values.pop("outputs", ("dos", "idos")),
        )
    for stray in ("variable", "points", "outputs", "start", "stop"):
        values.pop(stray, None)

    cfg_kwargs = {}
    for f in fields(RunConfig):
        if f.name == "sweep":
            continue
        if f.name in values:
            cfg_kwargs[f.name] = values.pop(f.name)
    return RunConfig(sweep=sweep, **cfg_kwargs)


def _format_value(key: str, value, sweep_variable: str) -> str:
    kind, unit = _KEYS[key]
    if kind in ("token", "string"):
        return str(value)
    if kind == "int":
        return str(int(value))
    if kind == "token_list":
        return ", ".join(value)
    if kind == "efield_list":
        return ", ".join(repr(float(v)) for v in value) + " V/m"
    if kind == "sweep":
        return f"{float(value)!r} {_SWEEP_UNIT[sweep_variable]}"
    if kind == "dimensionless":
        return repr(float(value))
    return f"{float(value)!r} {unit}"


def canonical_echo(cfg: RunConfig) -> str:
    """Serialize a RunConfig so parse_config reproduces it exactly."""
    lines = []
    order = ["B", "E_perp", "E_perp_list", "m_eff", "g_factor", "E_F", "tau",
             "temperature", "j_x"]
    for key in order:
        value = getattr(cfg, key)
        if value is None:
            continue
        lines.append(f"{key} = {_format_value(key, value, 'energy')}")
    if cfg.sweep is not None:
        sw = cfg.sweep
        lines.append(f"variable = {sw.variable}")
        lines.append(f"start = {_format_value('start', sw.start, sw.variable)}")
        lines.append(f"stop = {_format_value('stop', sw.stop, sw.variable)}")
        lines.append(f"points = {sw.points}")
        lines.append(f"outputs = {', '.join(sw.outputs)}")
    for key in ("quad_tol", "fp_rtol", "fp_atol", "k_cap", "out_dir"):
        lines.append(f"{key} = {_format_value(key, getattr(cfg, key), 'energy')}")
    return "\n".join(lines) + "\n"
