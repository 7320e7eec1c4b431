"""Monte Carlo sweeps over steering angles and RIS size.

Per-trial randomness comes from three independent streams per trial index:
the channel (subkey none), the random-baseline phases (subkey 1) and the
optimiser restart points (subkey 2).  Grid points are independent tasks
whose results are collected in task order, so the thread count never
changes the output.

Averaging convention: the per-trial linear SNRs are averaged, then the
mean is converted to dB.  The reported std is the population standard
deviation of the linear SNR carried to dB by the delta method,
``10 / ln(10) * std / mean``.
"""

from __future__ import annotations

import collections
import csv
import hashlib
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .channel import IID, ChannelModel, ChannelSet, derive_stream, draw
from .link import SteeringAngles, combine, energy, link_gains, to_db
from .optimizer import (NO_RIS, OPTIMAL, RANDOM, STRATEGY_KINDS, ZERO_PHASE, AngleGrid,
                        OptimizationResult, PhaseStrategy, baseline_phases, grid_search,
                        optimal_objective_batch, restart_points)
from .ris import beta
from .scenario import PHI_RANGE, Issue, Scenario, ScenarioError, scenario_items, validate

SWEEP_KINDS = ("tilt", "n_elements", "full_grid")
CSV_HEADER = ("theta_deg", "phi_deg", "n_elements", "strategy", "mean_snr_db",
              "std_snr_db", "trials", "seed")
NEG_INF = "-inf"
AVERAGING = ("mean of linear SNR converted to dB; std_snr_db = 10/ln(10) * "
             "std(linear, ddof=0) / mean(linear)")

PHASE_STREAM = 1
RESTART_STREAM = 2


@dataclass(frozen=True)
class SweepSpec:
    scenario: Scenario = field(default_factory=Scenario)
    sweep_kind: str = "tilt"
    phi_list: tuple = (10.0, 30.0, 50.0)
    n_list: tuple = (8, 16, 32, 64)
    strategies: tuple = (OPTIMAL, RANDOM)
    trials: int = 500
    grid: AngleGrid = field(default_factory=AngleGrid)
    solver: PhaseStrategy = field(default_factory=PhaseStrategy)
    channel: ChannelModel = IID

    def strategy(self, kind: str) -> PhaseStrategy:
        return replace(self.solver, kind=kind)

    def issues(self) -> list[Issue]:
        out = list(validate(self.scenario))
        if self.sweep_kind not in SWEEP_KINDS:
            out.append(Issue("bad_sweep_kind", f"sweep kind {self.sweep_kind!r} not in {SWEEP_KINDS}"))
        if not (isinstance(self.trials, int) and self.trials >= 1):
            out.append(Issue("trials_nonpositive", f"trials={self.trials!r} must be >= 1"))
        if not self.strategies:
            out.append(Issue("empty_list", "strategies must not be empty"))
        for k in self.strategies:
            if k not in STRATEGY_KINDS:
                out.append(Issue("bad_strategy", f"unknown strategy {k!r}"))
        if self.sweep_kind in ("tilt", "n_elements") and not self.phi_list:
            out.append(Issue("empty_list", "phi_list must not be empty"))
        for phi in self.phi_list:
            if not PHI_RANGE[0] <= phi <= PHI_RANGE[1]:
                out.append(Issue("phi_out_of_range", f"phi_list entry {phi!r} outside [0, 180]"))
        if self.sweep_kind == "n_elements" and not self.n_list:
            out.append(Issue("empty_list", "n_list must not be empty"))
        for n in self.n_list:
            if not (isinstance(n, int) and n >= 0):
                out.append(Issue("n_elements_negative", f"n_list entry {n!r} must be >= 0"))
        try:
            if not (self.grid.thetas() and self.grid.phis()):
                raise ValueError("empty grid")
        except ValueError as exc:
            out.append(Issue("bad_grid", str(exc)))
        if self.channel.kind == "fixed" and self.channel.fixed.m != self.scenario.m_antennas:
            out.append(Issue("channel_mismatch", "fixed channel M differs from m_antennas"))
        return out

    def checked(self) -> "SweepSpec":
        issues = self.issues()
        if issues:
            raise ScenarioError(issues)
        return self


@dataclass(frozen=True)
class SweepRow:
    theta_deg: float
    phi_deg: float
    n_elements: int
    strategy: str
    mean_snr_db: float
    std_snr_db: float
    trials: int
    seed: int

    def sort_key(self):
        return (self.phi_deg, self.theta_deg, self.n_elements, self.strategy)


@dataclass
class SweepResult:
    rows: list
    metadata: dict = field(default_factory=dict)

    def row(self, theta, phi, n, strategy) -> SweepRow:
        for r in self.rows:
            if (r.theta_deg, r.phi_deg, r.n_elements, r.strategy) == (theta, phi, n, strategy):
                return r
        raise KeyError((theta, phi, n, strategy))

    def curve(self, phi, n, strategy):
        """``(thetas, mean_snr_db)`` arrays of one strategy, ordered by theta."""
        rows = sorted((r for r in self.rows if r.phi_deg == phi and r.n_elements == n
                       and r.strategy == strategy), key=lambda r: r.theta_deg)
        return (np.array([r.theta_deg for r in rows]), np.array([r.mean_snr_db for r in rows]))


def summarize(values) -> tuple[float, float]:
    """Mean SNR in dB and delta-method std in dB of linear per-trial SNRs."""
    values = np.asarray(values, dtype=float)
    mean = float(np.mean(values))
    if mean <= 0.0:
        return -math.inf, 0.0
    std = float(np.std(values))
    return to_db(mean), 10.0 / math.log(10.0) * std / mean


class TrialBank:
    """Per-trial channels and random phases for one sweep.

    Channels are drawn once for the largest N needed; smaller RIS sizes use
    the leading elements, which equals a direct draw because iid draws are
    nested in N.  ``snr`` returns the per-trial linear SNR at one grid point.
    """

    def __init__(self, spec: SweepSpec, n_max: int):
        s = spec.scenario
        self.spec = spec
        self.n_max = n_max
        trials = range(spec.trials)
        self.channels = [self._channel(t, n_max) for t in trials]
        self.direct = np.stack([ch.h_d.conj() for ch in self.channels])
        self.cascade = np.stack([ch.g.conj()[:, None] * ch.h_r for ch in self.channels])
        self.random_psi = np.stack([
            baseline_phases(spec.strategy(RANDOM), n_max, derive_stream(s.seed, t, PHASE_STREAM))
            for t in trials])
        self.starts = np.stack([
            restart_points(spec.solver, n_max, derive_stream(s.seed, t, RESTART_STREAM))
            for t in trials])

    def _channel(self, t, n) -> ChannelSet:
        model, s = self.spec.channel, self.spec.scenario
        if model.kind == "fixed":
            if model.fixed.n < n:
                raise ValueError(f"fixed channel has {model.fixed.n} RIS elements, need {n}")
            return model.fixed.truncate(n).check(s.m_antennas, n)
        return draw(model, s.m_antennas, n, derive_stream(s.seed, t))

    def terms(self, theta, phi, n):
        s = self.spec.scenario
        gains = link_gains(s, SteeringAngles(theta, phi))
        a0 = math.sqrt(gains.alpha_d) * self.direct
        amp = math.sqrt(gains.alpha_r) * beta(s.ris, theta, phi)
        return a0, amp * self.cascade[:, :n]

    def snr(self, theta, phi, n, kind) -> np.ndarray:
        sigma2 = self.spec.scenario.noise_power
        if n == 0:
            kind = NO_RIS
        a0, b = self.terms(theta, phi, n)
        if kind == OPTIMAL:
            _, f, _ = optimal_objective_batch(a0, b, self.starts[:, :, :n], self.spec.solver)
            return f / sigma2
        if kind == NO_RIS:
            psi = np.zeros((len(a0), 0))
        elif kind == RANDOM:
            psi = self.random_psi[:, :n]
        elif kind == ZERO_PHASE:
            psi = np.zeros((len(a0), n))
        else:
            raise ValueError(f"unknown strategy {kind!r}")
        return energy(combine(a0, b, psi)) / sigma2


def _tasks(spec: SweepSpec, phis, thetas, n_values):
    seen = set()
    for phi in phis:
        for theta in thetas:
            for n in n_values:
                for kind in spec.strategies:
                    key = (theta, phi, n, NO_RIS if n == 0 else kind)
                    if key not in seen:
                        seen.add(key)
                        yield key


def _run(spec: SweepSpec, phis, thetas, n_values, threads: int) -> SweepResult:
    spec.checked()
    bank = TrialBank(spec, max(n_values))
    seed = spec.scenario.seed
    tasks = list(_tasks(spec, phis, thetas, n_values))

    def work(task):
        theta, phi, n, kind = task
        mean_db, std_db = summarize(bank.snr(theta, phi, n, kind))
        return SweepRow(float(theta), float(phi), int(n), kind, mean_db, std_db, spec.trials, seed)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(work, tasks))
    else:
        rows = [work(t) for t in tasks]
    rows.sort(key=SweepRow.sort_key)
    return SweepResult(rows, metadata(spec))


def run_tilt_sweep(spec: SweepSpec, threads: int = 1) -> SweepResult:
    """SNR versus BS tilt for every azimuth in ``phi_list`` at the scenario's N."""
    return _run(spec, spec.phi_list, spec.grid.thetas(), [spec.scenario.n_elements], threads)


def run_n_sweep(spec: SweepSpec, threads: int = 1) -> SweepResult:
    """SNR versus BS tilt for every RIS size in ``n_list``; N = 0 rows are
    labelled ``no_ris``."""
    return _run(spec, spec.phi_list, spec.grid.thetas(), list(spec.n_list), threads)


@dataclass
class JointReport:
    strategy: str
    theta_star: float
    phi_star: float
    mean_snr_linear: float
    mean_snr_db: float
    std_snr_db: float
    argmax_counts: dict
    per_trial: list


@dataclass
class JointResult:
    reports: dict
    sweep: SweepResult


def _modal(points):
    counts = collections.Counter(points)
    best = max(counts.values())
    return min(p for p, c in counts.items() if c == best), counts


def run_joint_optimization(spec: SweepSpec, threads: int = 1) -> JointResult:
    """Per trial, grid-search the steering angles (with each strategy's
    phases) and report the most frequent argmax and the mean best SNR."""
    spec.checked()
    s = spec.scenario
    n = s.n_elements
    bank = TrialBank(spec, n)

    def work(task):
        t, kind = task
        stream = RESTART_STREAM if kind == OPTIMAL else PHASE_STREAM
        return grid_search(s, spec.grid, bank.channels[t], spec.strategy(kind),
                           derive_stream(s.seed, t, stream))

    kinds = []
    for k in spec.strategies:
        k = NO_RIS if n == 0 else k
        if k not in kinds:
            kinds.append(k)
    tasks = [(t, k) for k in kinds for t in range(spec.trials)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, tasks))
    else:
        results = [work(t) for t in tasks]

    reports, rows = {}, []
    for i, kind in enumerate(kinds):
        per_trial: list[OptimizationResult] = results[i * spec.trials:(i + 1) * spec.trials]
        (theta, phi), counts = _modal([(r.theta_star, r.phi_star) for r in per_trial])
        values = [r.snr_linear for r in per_trial]
        mean_db, std_db = summarize(values)
        reports[kind] = JointReport(
            strategy=kind, theta_star=theta, phi_star=phi,
            mean_snr_linear=float(np.mean(values)), mean_snr_db=mean_db, std_snr_db=std_db,
            argmax_counts={f"{k[0]!r},{k[1]!r}": v for k, v in sorted(counts.items())},
            per_trial=per_trial)
        rows.append(SweepRow(float(theta), float(phi), n, kind, mean_db, std_db,
                             spec.trials, s.seed))
    rows.sort(key=SweepRow.sort_key)
    meta = metadata(spec)
    meta["argmax_counts"] = {k: r.argmax_counts for k, r in reports.items()}
    return JointResult(reports, SweepResult(rows, meta))


def run(spec: SweepSpec, threads: int = 1) -> SweepResult:
    if spec.sweep_kind == "tilt":
        return run_tilt_sweep(spec, threads)
    if spec.sweep_kind == "n_elements":
        return run_n_sweep(spec, threads)
    return run_joint_optimization(spec, threads).sweep


# -- output --------------------------------------------------------------------

def config_hash(spec: SweepSpec) -> str:
    from .channel import dumps_channel
    from .config import dumps_config

    text = dumps_config(spec)
    if spec.channel.kind == "fixed":
        text += dumps_channel(spec.channel.fixed)
    return hashlib.sha256(text.encode()).hexdigest()


def metadata(spec: SweepSpec) -> dict:
    return {
        "tool": "ris3d",
        "version": __version__,
        "sweep_kind": spec.sweep_kind,
        "config_sha256": config_hash(spec),
        "averaging": AVERAGING,
        "neg_inf_sentinel": NEG_INF,
        "scenario": dict(scenario_items(spec.scenario)),
    }


def _num(x: float) -> str:
    if x == -math.inf:
        return NEG_INF
    return repr(float(x))


def _row_fields(r: SweepRow) -> list[str]:
    return [_num(r.theta_deg), _num(r.phi_deg), str(r.n_elements), r.strategy,
            _num(r.mean_snr_db), _num(r.std_snr_db), str(r.trials), str(r.seed)]


def to_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in sorted(result.rows, key=SweepRow.sort_key):
        writer.writerow(_row_fields(r))
    return buf.getvalue()


def to_json(result: SweepResult) -> str:
    rows = []
    for r in sorted(result.rows, key=SweepRow.sort_key):
        d = asdict(r)
        for key in ("mean_snr_db", "std_snr_db"):
            if d[key] == -math.inf:
                d[key] = NEG_INF
        rows.append(d)
    return json.dumps({"metadata": result.metadata, "rows": rows}, indent=2) + "\n"


def emit(result: SweepResult, fmt: str = "csv", path=None) -> str:
    """Render ``result`` as CSV or JSON; write it to ``path`` when given."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown output format {fmt!r}")
    text = to_csv(result) if fmt == "csv" else to_json(result)
    if path is not None:
        path = Path(path)
        try:
            path.write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return text


def read_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))
