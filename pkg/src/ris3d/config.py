"""Config file: a [scenario] section (see ``ris3d.scenario``) plus a
[sweep] section.

Sweep keys::

    kind        tilt | n_elements | full_grid
    phi_list    comma-separated azimuths in degrees
    n_list      comma-separated RIS sizes
    strategies  comma-separated subset of optimal, random, zero_phase, no_ris
    trials      Monte Carlo trials per grid point
    theta_min, theta_max, theta_step, phi_min, phi_max, phi_step
                steering grid in degrees (bounds inclusive)
    restarts, tol, max_sweeps
                coordinate-ascent settings
    channel_file
                optional fixed channel in the plain-text matrix format,
                resolved relative to the config file
"""

from __future__ import annotations

import configparser
import io
from dataclasses import fields, replace
from pathlib import Path

from .channel import ChannelModel, load_channel
from .experiment import SweepSpec
from .optimizer import AngleGrid, PhaseStrategy
from .scenario import Issue, ScenarioError, scenario_from_mapping, scenario_items

_GRID_KEYS = [f.name for f in fields(AngleGrid)]
_SOLVER_KEYS = ("restarts", "tol", "max_sweeps")
_SWEEP_KEYS = {"kind", "phi_list", "n_list", "strategies", "trials", "channel_file",
               *_GRID_KEYS, *_SOLVER_KEYS}


def _fmt_list(values) -> str:
    return ", ".join(repr(v) if isinstance(v, float) else str(v) for v in values)


def _split(raw: str) -> list[str]:
    return [p.strip() for p in raw.split(",") if p.strip()]


def dumps_config(spec: SweepSpec, channel_file: str | None = None) -> str:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp["scenario"] = dict(scenario_items(spec.scenario))
    sweep = {
        "kind": spec.sweep_kind,
        "phi_list": _fmt_list(spec.phi_list),
        "n_list": _fmt_list(spec.n_list),
        "strategies": _fmt_list(spec.strategies),
        "trials": str(spec.trials),
    }
    for key in _GRID_KEYS:
        sweep[key] = repr(float(getattr(spec.grid, key)))
    sweep["restarts"] = str(spec.solver.restarts)
    sweep["tol"] = repr(spec.solver.tol)
    sweep["max_sweeps"] = str(spec.solver.max_sweeps)
    if channel_file is not None:
        sweep["channel_file"] = channel_file
    cp["sweep"] = sweep
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def loads_config(text: str, base_dir: Path | None = None) -> SweepSpec:
    """Parse a config; missing keys keep their defaults."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError([Issue("config_syntax", str(exc).splitlines()[0])]) from None
    extra = sorted(set(cp.sections()) - {"scenario", "sweep"})
    if extra:
        raise ScenarioError([Issue("unknown_section", f"unknown section [{s}]") for s in extra])
    spec = SweepSpec()
    if cp.has_section("scenario"):
        spec = replace(spec, scenario=scenario_from_mapping(dict(cp["scenario"])))
    if not cp.has_section("sweep"):
        return spec
    sec = dict(cp["sweep"])
    unknown = sorted(set(sec) - _SWEEP_KEYS)
    if unknown:
        raise ScenarioError([Issue("unknown_key", f"unknown sweep key {k!r}") for k in unknown])
    try:
        changes = {}
        if "kind" in sec:
            changes["sweep_kind"] = sec["kind"].strip()
        if "phi_list" in sec:
            changes["phi_list"] = tuple(float(v) for v in _split(sec["phi_list"]))
        if "n_list" in sec:
            changes["n_list"] = tuple(int(v) for v in _split(sec["n_list"]))
        if "strategies" in sec:
            changes["strategies"] = tuple(_split(sec["strategies"]))
        if "trials" in sec:
            changes["trials"] = int(sec["trials"])
        grid = {k: float(sec[k]) for k in _GRID_KEYS if k in sec}
        if grid:
            changes["grid"] = replace(spec.grid, **grid)
        solver = {}
        if "restarts" in sec:
            solver["restarts"] = int(sec["restarts"])
        if "max_sweeps" in sec:
            solver["max_sweeps"] = int(sec["max_sweeps"])
        if "tol" in sec:
            solver["tol"] = float(sec["tol"])
        if solver:
            changes["solver"] = PhaseStrategy(**{**_solver_dict(spec.solver), **solver})
    except ValueError as exc:
        raise ScenarioError([Issue("bad_value", str(exc))]) from None
    if "channel_file" in sec:
        path = Path(sec["channel_file"].strip())
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        try:
            changes["channel"] = ChannelModel("fixed", load_channel(path))
        except ValueError as exc:
            raise ScenarioError([Issue("bad_channel_file", f"{path}: {exc}")]) from None
    return replace(spec, **changes)


def _solver_dict(p: PhaseStrategy) -> dict:
    return {"kind": p.kind, "restarts": p.restarts, "tol": p.tol, "max_sweeps": p.max_sweeps}


def load_config(path) -> SweepSpec:
    path = Path(path)
    return loads_config(path.read_text(), base_dir=path.parent)
