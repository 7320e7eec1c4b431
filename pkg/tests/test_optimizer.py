import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import random_channel
from ris3d.channel import ChannelSet
from ris3d.link import SteeringAngles, effective_channel, link_gains, path_terms, snr
from ris3d.optimizer import (AngleGrid, PhaseStrategy, baseline_phases, grid_search,
                             objective, optimize_phases, quantization_gap_bound,
                             quantized_phase_oracle, restart_points)
from ris3d.ris import beta
from ris3d.scenario import Scenario, reference_scenario

OPT = PhaseStrategy()
RIS_DIR = SteeringAngles(-40.0, 50.0)


def small(m, n, **kw):
    return reference_scenario().with_(m_antennas=m, n_elements=n, **kw)


def closed_form_m1(s, a, ch):
    """Global optimum for a single BS antenna: every term phase-aligned."""
    ad, ar = link_gains(s, a)
    b = beta(s.ris, a.theta_bs, a.phi_bs)
    amp = math.sqrt(ad) * abs(ch.h_d[0]) + math.sqrt(ar) * b * np.sum(
        np.abs(ch.g) * np.abs(ch.h_r[:, 0]))
    return amp**2 / s.noise_power


def test_m1_matches_closed_form(rng):
    for n in (1, 3, 8, 20):
        s = small(1, n)
        for _ in range(10):
            ch = random_channel(rng, 1, n)
            a = SteeringAngles(rng.uniform(-60, 0), rng.uniform(0, 90))
            sol = optimize_phases(s, a, ch, OPT, rng)
            assert sol.snr_linear == pytest.approx(closed_form_m1(s, a, ch), rel=1e-9)


def test_single_element_matches_dense_grid(rng):
    for m in (1, 3, 16):
        s = small(m, 1)
        ch = random_channel(rng, m, 1)
        sol = optimize_phases(s, RIS_DIR, ch, OPT, rng)
        assert sol.sweeps_used <= 2
        a0, b = path_terms(s, RIS_DIR, ch)
        grid = np.arange(3600) * 2 * np.pi / 3600
        best = max(objective(a0, b, [p]) for p in grid)
        gap = quantization_gap_bound(s, RIS_DIR, ch, 3600, best)
        assert best - 1e-12 * best <= sol.snr_linear <= best + gap


def test_zero_reflection_is_phase_independent(rng):
    s = small(4, 5)
    ch = random_channel(rng, 4, 5)
    ch = ChannelSet(ch.h_r, ch.h_d, np.zeros(5, complex))
    sol = optimize_phases(s, RIS_DIR, ch, OPT, rng)
    a0, _ = path_terms(s, RIS_DIR, ch)
    assert sol.snr_linear == pytest.approx(np.sum(np.abs(a0) ** 2), rel=1e-12)
    assert sol.sweeps_used == 1


def test_rejects_empty_ris_and_baseline_kind(rng):
    with pytest.raises(ValueError):
        optimize_phases(small(4, 0), RIS_DIR, random_channel(rng, 4, 0), OPT, rng)
    with pytest.raises(ValueError):
        optimize_phases(small(4, 2), RIS_DIR, random_channel(rng, 4, 2),
                        PhaseStrategy("random"), rng)


def test_traces_are_monotone(rng):
    for _ in range(50):
        m, n = int(rng.integers(1, 9)), int(rng.integers(1, 33))
        s = small(m, n)
        sol = optimize_phases(s, RIS_DIR, random_channel(rng, m, n), OPT, rng, record_updates=True)
        for trace in (sol.objective_trace, sol.update_trace):
            steps = np.diff(trace)
            assert np.all(steps >= -1e-12 * np.asarray(trace[1:]))
        assert len(sol.objective_trace) == sol.sweeps_used + 1
        assert sol.objective_trace[-1] == pytest.approx(sol.snr_linear, rel=1e-12)


def test_result_matches_link_snr(rng):
    s = reference_scenario().with_(noise_power=0.01)
    ch = random_channel(rng, 64, 32)
    sol = optimize_phases(s, RIS_DIR, ch, OPT, rng)
    assert np.all((sol.psi >= 0) & (sol.psi < 2 * np.pi))
    again = snr(s, effective_channel(s, RIS_DIR, sol.psi, ch)).linear
    assert sol.snr_linear == pytest.approx(again, rel=1e-9)


def test_dominates_baselines(rng):
    s = small(8, 16)
    for _ in range(20):
        ch = random_channel(rng, 8, 16)
        a = SteeringAngles(rng.uniform(-90, 90), rng.uniform(0, 180))
        best = optimize_phases(s, a, ch, OPT, rng).snr_linear
        for kind in ("zero_phase", "random"):
            psi = baseline_phases(PhaseStrategy(kind), 16, rng)
            assert best >= snr(s, effective_channel(s, a, psi, ch)).linear * (1 - 1e-9)


def test_more_restarts_never_hurt(rng):
    s = small(4, 12)
    ch = random_channel(rng, 4, 12)
    starts = restart_points(PhaseStrategy(restarts=6), 12, rng)
    one = optimize_phases(s, RIS_DIR, ch, PhaseStrategy(restarts=1), starts=starts[:1])
    six = optimize_phases(s, RIS_DIR, ch, PhaseStrategy(restarts=6), starts=starts)
    assert six.snr_linear >= one.snr_linear


def test_restart_points_layout(rng):
    pts = restart_points(PhaseStrategy(restarts=3), 5, np.random.default_rng(1))
    assert pts.shape == (3, 5) and np.all(pts[0] == 0)
    nested = restart_points(PhaseStrategy(restarts=3), 2, np.random.default_rng(1))
    assert_allclose(nested, pts[:, :2])
    with pytest.raises(ValueError):
        restart_points(PhaseStrategy(restarts=2), 5)


def test_baseline_phases():
    assert baseline_phases(PhaseStrategy("zero_phase"), 4).tolist() == [0, 0, 0, 0]
    a = baseline_phases(PhaseStrategy("random"), 7, np.random.default_rng(3))
    b = baseline_phases(PhaseStrategy("random"), 7, np.random.default_rng(3))
    assert_allclose(a, b, rtol=0)
    big = baseline_phases(PhaseStrategy("random"), 10_000, np.random.default_rng(4))
    # uniform mean pi, std error 2*pi/sqrt(12)/100 ~ 0.018; the window is ~8.7 sigma
    assert 0.95 * np.pi <= big.mean() <= 1.05 * np.pi
    with pytest.raises(ValueError):
        baseline_phases(PhaseStrategy("optimal"), 3)


def test_oracle_alignment():
    s = Scenario(m_antennas=1, n_elements=1, theta_ris_o=0.0, phi_ris_o=90.0,
                 theta_ue=0.0, phi_ue=90.0)
    ones = ChannelSet(np.ones((1, 1), complex), np.ones(1, complex), np.ones(1, complex))
    sol = quantized_phase_oracle(s, SteeringAngles(0.0, 90.0), ones, 4)
    assert sol.psi.tolist() == [0.0]
    assert sol.snr_linear == pytest.approx(4.0)


def test_oracle_guard(rng):
    s = small(2, 0)
    with pytest.raises(ValueError):
        quantized_phase_oracle(s, RIS_DIR, random_channel(rng, 2, 0), 8)
    with pytest.raises(ValueError):
        quantized_phase_oracle(small(2, 5), RIS_DIR, random_channel(rng, 2, 5), 2)
    with pytest.raises(ValueError):
        quantized_phase_oracle(small(2, 4), RIS_DIR, random_channel(rng, 2, 4), 64)


def test_oracle_matches_brute_force_loop(rng):
    s = small(3, 2)
    ch = random_channel(rng, 3, 2)
    a0, b = path_terms(s, RIS_DIR, ch)
    grid = 2 * np.pi * np.arange(8) / 8
    brute = max(objective(a0, b, [p, q]) for p in grid for q in grid)
    assert quantized_phase_oracle(s, RIS_DIR, ch, 8).snr_linear == pytest.approx(brute, rel=1e-12)


def test_ascent_within_quantization_gap_of_oracle(rng):
    s = small(2, 2)
    for _ in range(10):
        ch = random_channel(rng, 2, 2)
        q = quantized_phase_oracle(s, RIS_DIR, ch, 64)
        gap = quantization_gap_bound(s, RIS_DIR, ch, 64, q.snr_linear)
        got = optimize_phases(s, RIS_DIR, ch, OPT, rng).snr_linear
        assert q.snr_linear - gap <= got <= q.snr_linear + gap


# -- grid search -------------------------------------------------------------

def test_angle_grid_axes():
    g = AngleGrid()
    assert len(g.thetas()) == 181 and g.thetas()[0] == -90 and g.thetas()[-1] == 90
    assert len(g.phis()) == 91 and g.phis()[-1] == 180
    assert AngleGrid(0, 1, 0.1, 0, 0, 1).thetas()[-1] == pytest.approx(1.0)
    pts = AngleGrid(-1, 0, 1, 0, 2, 2).points()
    assert pts == [(-1, 0), (-1, 2), (0, 0), (0, 2)]
    with pytest.raises(ValueError):
        AngleGrid(theta_step=0).thetas()
    with pytest.raises(ValueError):
        AngleGrid(theta_min=5, theta_max=0).thetas()


def test_single_point_grid(rng):
    s = small(4, 6)
    ch = random_channel(rng, 4, 6)
    grid = AngleGrid(-40, -40, 1, 50, 50, 1)
    res = grid_search(s, grid, ch, OPT, np.random.default_rng(2))
    direct = optimize_phases(s, RIS_DIR, ch, OPT, np.random.default_rng(2))
    assert (res.theta_star, res.phi_star) == (-40, 50)
    assert res.snr_linear == direct.snr_linear
    assert_allclose(res.psi_star, direct.psi)


def test_no_ris_argmax_at_user(rng):
    s = reference_scenario()
    ch = random_channel(rng, 64, 32)
    grid = AngleGrid(theta_step=1.0, phi_step=2.0)
    res = grid_search(s, grid, ch, PhaseStrategy("no_ris"))
    assert abs(res.theta_star - s.theta_ue) <= 1.0 and abs(res.phi_star - s.phi_ue) <= 2.0
    assert res.psi_star.size == 0


def test_two_point_argmax(rng):
    s = small(4, 6)
    ch = random_channel(rng, 4, 6)
    grid = AngleGrid(-40, 40, 80, 50, 50, 1)   # points (-40, 50) and (40, 50)
    far = optimize_phases(s, SteeringAngles(40, 50), ch, OPT, np.random.default_rng(0))
    near = optimize_phases(s, RIS_DIR, ch, OPT, np.random.default_rng(0))
    assert near.snr_linear > far.snr_linear
    res = grid_search(s, grid, ch, OPT, np.random.default_rng(0))
    assert (res.theta_star, res.phi_star) == (-40, 50)


def test_ties_break_to_smallest_angles():
    # no_ris with zero direct gain: every point scores zero
    s = small(2, 0, include_direct=False)
    ch = ChannelSet(np.zeros((0, 2), complex), np.ones(2, complex), np.zeros(0, complex))
    res = grid_search(s, AngleGrid(-10, 10, 5, 20, 40, 10), ch, PhaseStrategy("no_ris"))
    assert (res.theta_star, res.phi_star) == (-10, 20)


def test_empty_grid():
    with pytest.raises(ValueError):
        grid_search(small(1, 0), AngleGrid(0, -1, 1, 0, 0, 1), None)


def test_argmax_invariant_to_noise_scaling(rng):
    s = small(4, 5)
    ch = random_channel(rng, 4, 5)
    grid = AngleGrid(-60, -20, 10, 20, 80, 20)
    a = grid_search(s, grid, ch, OPT, np.random.default_rng(5))
    b = grid_search(s.with_(noise_power=37.0), grid, ch, OPT, np.random.default_rng(5))
    assert (a.theta_star, a.phi_star) == (b.theta_star, b.phi_star)
    assert_allclose(a.psi_star, b.psi_star)
    assert b.snr_linear == pytest.approx(a.snr_linear / 37.0, rel=1e-12)


def test_grid_result_consistent_with_link(rng):
    s = small(8, 10)
    ch = random_channel(rng, 8, 10)
    res = grid_search(s, AngleGrid(-60, -20, 20, 30, 70, 20), ch, OPT, np.random.default_rng(1))
    a = SteeringAngles(res.theta_star, res.phi_star)
    assert res.snr_linear == pytest.approx(
        snr(s, effective_channel(s, a, res.psi_star, ch)).linear, rel=1e-9)
    assert np.all(np.diff(res.objective_trace) >= -1e-12 * np.asarray(res.objective_trace[1:]))


@pytest.mark.parametrize("kind", ["random", "zero_phase"])
def test_grid_search_baselines(rng, kind):
    s = small(4, 3)
    ch = random_channel(rng, 4, 3)
    res = grid_search(s, AngleGrid(-50, -30, 10, 40, 60, 10), ch, PhaseStrategy(kind),
                      np.random.default_rng(8))
    a = SteeringAngles(res.theta_star, res.phi_star)
    assert res.snr_linear == snr(s, effective_channel(s, a, res.psi_star, ch)).linear
