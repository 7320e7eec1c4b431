"""Experiment parameters and their validation.

Angles are stored in degrees.  The RIS direction uses the signed frame in
which steering to ``(theta_ris_o, phi_ris_o)`` points the main beam at the
surface; in the reference setup that tilt is -40 degrees.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field, fields, replace
from typing import NamedTuple

from .antenna import AntennaPattern
from .ris import RisConfig

THETA_RANGE = (-90.0, 90.0)
PHI_RANGE = (0.0, 180.0)
SEED_MAX = 2**64 - 1


class Issue(NamedTuple):
    code: str
    message: str


class ScenarioError(ValueError):
    """Raised when a scenario or config fails validation."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(f"{i.code}: {i.message}" for i in self.issues))


@dataclass(frozen=True)
class Scenario:
    """All fixed parameters of one experiment.

    ``n_elements == 0`` encodes the network without an RIS.  The two
    ``include_*`` switches zero the corresponding large-scale gain, which
    isolates one path for diagnostics.
    """

    m_antennas: int = 64
    n_elements: int = 32
    theta_ris_o: float = -40.0
    phi_ris_o: float = 50.0
    theta_ue: float = -20.0
    phi_ue: float = 10.0
    antenna: AntennaPattern = field(default_factory=AntennaPattern)
    ris: RisConfig = field(default_factory=RisConfig)
    noise_power: float = 1.0
    seed: int = 0
    include_direct: bool = True
    include_reflected: bool = True

    def with_(self, **changes) -> "Scenario":
        return replace(self, **changes)

    def checked(self) -> "Scenario":
        issues = validate(self)
        if issues:
            raise ScenarioError(issues)
        return self


def reference_scenario() -> Scenario:
    """Simulation setup used for the tilt and element-count figures."""
    return Scenario().checked()


def _angle_issues(name, value, lo, hi):
    if not (isinstance(value, (int, float)) and math.isfinite(value)):
        yield Issue("angle_not_finite", f"{name}={value!r} is not a finite number")
    elif not lo <= value <= hi:
        code = "theta_out_of_range" if name.startswith("theta") else "phi_out_of_range"
        yield Issue(code, f"{name}={value!r} outside [{lo:g}, {hi:g}] degrees")


def validate(s: Scenario) -> list[Issue]:
    """Return every violated invariant of ``s``; an empty list means valid."""
    out: list[Issue] = []
    if not (isinstance(s.m_antennas, int) and s.m_antennas >= 1):
        out.append(Issue("m_antennas_nonpositive", f"m_antennas={s.m_antennas!r} must be >= 1"))
    if not (isinstance(s.n_elements, int) and s.n_elements >= 0):
        out.append(Issue("n_elements_negative", f"n_elements={s.n_elements!r} must be >= 0"))
    for name in ("theta_ris_o", "theta_ue"):
        out.extend(_angle_issues(name, getattr(s, name), *THETA_RANGE))
    for name in ("phi_ris_o", "phi_ue"):
        out.extend(_angle_issues(name, getattr(s, name), *PHI_RANGE))
    out.extend(Issue(*i) for i in s.antenna.issues())
    out.extend(Issue(*i) for i in s.ris.issues())
    if not (isinstance(s.noise_power, (int, float)) and s.noise_power > 0
            and math.isfinite(s.noise_power)):
        out.append(Issue("noise_power_nonpositive", f"noise_power={s.noise_power!r} must be > 0"))
    if not (isinstance(s.seed, int) and 0 <= s.seed <= SEED_MAX):
        out.append(Issue("seed_out_of_range", f"seed={s.seed!r} must be an unsigned 64-bit int"))
    return out


# -- config file -------------------------------------------------------------
#
# INI-style, one [scenario] section with one flat key per field.  Nested
# antenna / RIS fields are flattened under their own names.  Floats are
# written with repr() so a dump/parse round trip is exact.

_NESTED = {"antenna": AntennaPattern, "ris": RisConfig}


def _flat_keys():
    for f in fields(Scenario):
        if f.name in _NESTED:
            for g in fields(_NESTED[f.name]):
                yield f.name, g.name, g.type
        else:
            yield None, f.name, f.type


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def scenario_items(s: Scenario) -> list[tuple[str, str]]:
    items = []
    for parent, key, _ in _flat_keys():
        obj = getattr(s, parent) if parent else s
        items.append((key, _fmt(getattr(obj, key))))
    return items


def _parse(key: str, raw: str, typ: str):
    raw = raw.strip()
    if typ == "int":
        return int(raw)
    if typ == "bool":
        if raw.lower() in ("true", "yes", "1", "on"):
            return True
        if raw.lower() in ("false", "no", "0", "off"):
            return False
        raise ValueError(f"{key}: not a boolean: {raw!r}")
    return float(raw)


def scenario_from_mapping(section) -> Scenario:
    """Build a Scenario from a flat str->str mapping; missing keys keep the
    reference values, unknown keys are rejected."""
    known = {key for _, key, _ in _flat_keys()}
    unknown = sorted(set(section) - known)
    if unknown:
        raise ScenarioError([Issue("unknown_key", f"unknown scenario key {k!r}") for k in unknown])
    top, nested = {}, {name: {} for name in _NESTED}
    issues = []
    for parent, key, typ in _flat_keys():
        if key not in section:
            continue
        try:
            value = _parse(key, section[key], typ)
        except ValueError as exc:
            issues.append(Issue("bad_value", f"{key}: {exc}"))
            continue
        (nested[parent] if parent else top)[key] = value
    if issues:
        raise ScenarioError(issues)
    for name, cls in _NESTED.items():
        top[name] = cls(**nested[name])
    return Scenario(**top)


def dumps_scenario(s: Scenario) -> str:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp["scenario"] = dict(scenario_items(s))
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def loads_scenario(text: str) -> Scenario:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp.read_string(text)
    if not cp.has_section("scenario"):
        return Scenario()
    return scenario_from_mapping(dict(cp["scenario"]))
