"""Joint steering-angle / RIS-phase optimisation and comparison baselines.

For fixed steering angles the phase problem is
``max_psi ||a0 + sum_i exp(1j psi_i) b_i||^2``, solved by exact
coordinate ascent with restarts.  Steering angles are searched on a grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .channel import ChannelSet
from .link import SteeringAngles, combine, energy, path_terms, to_db
from .ris import TWO_PI, wrap_phases
from .scenario import PHI_RANGE, THETA_RANGE, Scenario

OPTIMAL = "optimal"
RANDOM = "random"
ZERO_PHASE = "zero_phase"
NO_RIS = "no_ris"
STRATEGY_KINDS = (OPTIMAL, RANDOM, ZERO_PHASE, NO_RIS)


@dataclass(frozen=True)
class PhaseStrategy:
    kind: str = OPTIMAL
    restarts: int = 4
    tol: float = 1e-9
    max_sweeps: int = 200

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise ValueError(f"unknown phase strategy {self.kind!r}")
        if self.restarts < 1 or self.max_sweeps < 1 or not self.tol > 0:
            raise ValueError("need restarts >= 1, max_sweeps >= 1 and tol > 0")


def _axis(lo, hi, step, name):
    if not step > 0:
        raise ValueError(f"{name} step must be > 0")
    if lo > hi:
        raise ValueError(f"{name} min {lo} exceeds max {hi}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + k * step for k in range(count)]


@dataclass(frozen=True)
class AngleGrid:
    """Rectangular steering grid in degrees (bounds inclusive)."""

    theta_min: float = THETA_RANGE[0]
    theta_max: float = THETA_RANGE[1]
    theta_step: float = 1.0
    phi_min: float = PHI_RANGE[0]
    phi_max: float = PHI_RANGE[1]
    phi_step: float = 2.0

    def thetas(self) -> list[float]:
        return _axis(self.theta_min, self.theta_max, self.theta_step, "theta")

    def phis(self) -> list[float]:
        return _axis(self.phi_min, self.phi_max, self.phi_step, "phi")

    def points(self):
        """Grid points in tie-breaking order: theta ascending, then phi."""
        return [SteeringAngles(t, p) for t in self.thetas() for p in self.phis()]


@dataclass
class PhaseSolution:
    psi: np.ndarray
    snr_linear: float
    sweeps_used: int = 0
    objective_trace: list = field(default_factory=list)
    update_trace: list | None = None

    @property
    def snr_db(self) -> float:
        return to_db(self.snr_linear)


@dataclass
class OptimizationResult:
    theta_star: float
    phi_star: float
    psi_star: np.ndarray
    snr_linear: float
    snr_db: float
    sweeps_used: int
    objective_trace: list


def restart_points(strat: PhaseStrategy, n: int, rng=None) -> np.ndarray:
    """Initial phases, shape (restarts, n): zeros first, then uniform draws."""
    starts = np.zeros((strat.restarts, n))
    if strat.restarts > 1:
        if rng is None:
            raise ValueError("random restarts need a random stream")
        # drawn element-major so the first n columns do not depend on n
        starts[1:] = rng.uniform(0.0, TWO_PI, size=(n, strat.restarts - 1)).T
    return starts


def split(z):
    z = np.asarray(z, dtype=complex)
    return np.ascontiguousarray(z.real), np.ascontiguousarray(z.imag)


def optimize_phases(s: Scenario, a: SteeringAngles, ch: ChannelSet,
                    strat: PhaseStrategy = PhaseStrategy(), rng=None, *,
                    starts=None, record_updates=False) -> PhaseSolution:
    """Coordinate ascent over the RIS phases at fixed steering angles.

    Restart 0 starts from all-zero phases, later restarts from ``starts``
    or from uniform draws on ``rng``.  The best restart is returned with its
    per-sweep objective (SNR) trace.  With ``record_updates`` the SNR after
    every single update is kept as well (N element updates plus one
    common-phase update per sweep).
    """
    if strat.kind != OPTIMAL:
        raise ValueError(f"optimize_phases needs the optimal strategy, got {strat.kind!r}")
    if ch.n == 0:
        raise ValueError("no RIS elements to optimise; use the no_ris strategy")
    a0, b = path_terms(s, a, ch)
    if starts is None:
        starts = restart_points(strat, ch.n, rng)
    starts = np.atleast_2d(np.asarray(starts, dtype=float))
    a0r, a0i = split(a0)
    br, bi = split(b)
    best = None
    for start in starts:
        cr, ci = np.cos(start), np.sin(start)
        trace = np.zeros(strat.max_sweeps + 1)
        updates = np.zeros(strat.max_sweeps * (ch.n + 1) + 1 if record_updates else 0)
        f, used = _kernels.ascend(a0r, a0i, br, bi, cr, ci, strat.tol, strat.max_sweeps,
                                  trace, updates)
        if best is None or f > best[0]:
            best = (f, used, np.arctan2(ci, cr), trace[: used + 1],
                    updates[: used * (ch.n + 1) + 1] if record_updates else None)
    f, used, psi, trace, updates = best
    sigma2 = s.noise_power
    return PhaseSolution(
        psi=wrap_phases(psi),
        snr_linear=f / sigma2,
        sweeps_used=int(used),
        objective_trace=list(trace / sigma2),
        update_trace=None if updates is None else list(updates / sigma2),
    )


def optimal_objective_batch(a0, b, starts, strat: PhaseStrategy):
    """Best-of-restarts objective for a stack of instances.

    ``a0`` is (T, M), ``b`` is (T, N, M) and ``starts`` is (T, R, N).
    Returns ``(psi, f, sweeps)`` per instance; ``f`` is the raw objective
    (not divided by the noise power).
    """
    a0r, a0i = split(a0)
    br, bi = split(b)
    psi, f, sweeps = _kernels.ascend_batch(a0r, a0i, br, bi,
                                           np.ascontiguousarray(starts, dtype=float),
                                           strat.tol, strat.max_sweeps)
    return wrap_phases(psi), f, sweeps


def baseline_phases(strat: PhaseStrategy, n: int, rng=None) -> np.ndarray:
    """Comparison phases: uniform on [0, 2*pi) for ``random``, zeros for
    ``zero_phase``."""
    if strat.kind == ZERO_PHASE:
        return np.zeros(n)
    if strat.kind == RANDOM:
        if rng is None:
            raise ValueError("random phases need a random stream")
        return wrap_phases(rng.uniform(0.0, TWO_PI, size=n))
    raise ValueError(f"{strat.kind!r} is not a baseline phase strategy")


def objective(a0, b, psi) -> float:
    return float(energy(combine(a0, b, psi)))


def grid_search(s: Scenario, grid: AngleGrid, ch: ChannelSet,
                strat: PhaseStrategy = PhaseStrategy(), rng=None) -> OptimizationResult:
    """Evaluate every grid point under ``strat`` and return the best one.

    Random draws (restart points or random baseline phases) are taken from
    ``rng`` once and reused at every grid point.  Ties go to the smallest
    theta, then the smallest phi.  A channel without RIS elements is
    evaluated as ``no_ris`` whatever the strategy.
    """
    points = grid.points()
    if not points:
        raise ValueError("empty angle grid")
    kind = NO_RIS if ch.n == 0 else strat.kind
    starts = restart_points(strat, ch.n, rng) if kind == OPTIMAL else None
    fixed_psi = baseline_phases(strat, ch.n, rng) if kind in (RANDOM, ZERO_PHASE) else None
    best = None
    for a in points:
        if kind == OPTIMAL:
            sol = optimize_phases(s, a, ch, strat, starts=starts)
        else:
            a0, b = path_terms(s, a, ch)
            psi = np.zeros(0) if kind == NO_RIS else fixed_psi
            gamma = objective(a0, b, psi) / s.noise_power
            sol = PhaseSolution(psi=psi, snr_linear=gamma, objective_trace=[gamma])
        if best is None or sol.snr_linear > best[1].snr_linear:
            best = (a, sol)
    a, sol = best
    return OptimizationResult(
        theta_star=a.theta_bs,
        phi_star=a.phi_bs,
        psi_star=sol.psi,
        snr_linear=sol.snr_linear,
        snr_db=sol.snr_db,
        sweeps_used=sol.sweeps_used,
        objective_trace=sol.objective_trace,
    )


MAX_ORACLE_ELEMENTS = 4
MAX_ORACLE_COMBINATIONS = 10**7


def quantized_phase_oracle(s: Scenario, a: SteeringAngles, ch: ChannelSet,
                           levels: int) -> PhaseSolution:
    """Exhaustive search over phases on the grid ``2*pi*k/levels``.

    Only for tiny instances (N <= 4, levels**N <= 1e7); meant as an
    independent check of the ascent.  The first best combination in
    lexicographic order wins.
    """
    n = ch.n
    if not 1 <= n <= MAX_ORACLE_ELEMENTS or levels < 1 or levels**n > MAX_ORACLE_COMBINATIONS:
        raise ValueError(f"oracle limited to 1 <= N <= {MAX_ORACLE_ELEMENTS} and "
                         f"levels**N <= {MAX_ORACLE_COMBINATIONS}; got N={n}, levels={levels}")
    a0, b = path_terms(s, a, ch)
    rot = np.exp(2j * np.pi * np.arange(levels) / levels)
    total = a0.reshape((1,) * n + (-1,))
    for i in range(n):
        shape = [1] * n + [1]
        shape[i] = levels
        total = total + rot.reshape(shape) * b[i]
    f = np.sum(np.abs(total) ** 2, axis=-1)
    idx = np.unravel_index(int(np.argmax(f)), f.shape)
    psi = 2.0 * np.pi * np.asarray(idx, dtype=float) / levels
    return PhaseSolution(psi=psi, snr_linear=float(f[idx]) / s.noise_power)


def quantization_gap_bound(s: Scenario, a: SteeringAngles, ch: ChannelSet,
                           levels: int, oracle_snr: float) -> float:
    """Upper bound on (continuous optimum - grid optimum), in SNR units.

    Rounding each optimal phase to the nearest grid point moves it by at
    most ``pi/levels``; since ``|exp(1j d) - 1| <= |d|`` the optimal sum
    moves by at most ``delta = (pi/levels) * sum_i ||b_i||``.  So
    ``sqrt(f_grid) >= sqrt(f_opt) - delta`` and
    ``f_opt - f_grid <= 2 delta sqrt(f_grid) + delta**2``.
    """
    _, b = path_terms(s, a, ch)
    delta = (math.pi / levels) * float(np.sum(np.linalg.norm(b, axis=1)))
    f_grid = oracle_snr * s.noise_power
    return (2.0 * delta * math.sqrt(f_grid) + delta * delta) / s.noise_power

