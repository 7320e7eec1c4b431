"""Effective channel, MRT beamformer and received SNR.

Throughout, ``h_eff`` is the column vector whose conjugate transpose is the
row ``sqrt(alpha_d) h_d^H + sqrt(alpha_r) g^H Omega H_r``.  The received
sample is ``h_eff^H w s + n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .antenna import gain_linear
from .channel import ChannelSet
from .ris import beta
from .scenario import Scenario


class SteeringAngles(NamedTuple):
    """BS tilt and azimuth in degrees."""

    theta_bs: float
    phi_bs: float


class LinkGains(NamedTuple):
    alpha_d: float
    alpha_r: float


@dataclass(frozen=True)
class EffectiveChannel:
    h_eff: np.ndarray

    @property
    def row(self) -> np.ndarray:
        """``h_eff^H`` as a 1-D array."""
        return self.h_eff.conj()


@dataclass(frozen=True)
class Beamformer:
    w: np.ndarray


class Snr(NamedTuple):
    linear: float
    db: float


class ZeroChannelError(ArithmeticError):
    pass


def link_gains(s: Scenario, a: SteeringAngles) -> LinkGains:
    """BS gains toward the UE (direct path) and toward the RIS."""
    alpha_d = gain_linear(s.antenna, a.theta_bs, a.phi_bs, s.theta_ue, s.phi_ue)
    alpha_r = gain_linear(s.antenna, a.theta_bs, a.phi_bs, s.theta_ris_o, s.phi_ris_o)
    return LinkGains(
        alpha_d if s.include_direct else 0.0,
        alpha_r if s.include_reflected else 0.0,
    )


def path_terms(s: Scenario, a: SteeringAngles, ch: ChannelSet):
    """Split ``h_eff^H`` into the phase-free part and one row per element.

    Returns ``(a0, b)`` with ``a0`` of shape (M,) and ``b`` of shape (N, M)
    such that ``h_eff^H = a0 + sum_i exp(1j psi_i) b[i]``.  The RIS
    amplitude is evaluated at the steering angles.
    """
    gains = link_gains(s, a)
    a0 = math.sqrt(gains.alpha_d) * ch.h_d.conj()
    amp = math.sqrt(gains.alpha_r) * beta(s.ris, a.theta_bs, a.phi_bs)
    b = amp * (ch.g.conj()[:, None] * ch.h_r)
    return a0, b


def combine(a0, b, psi):
    """``a0 + sum_i exp(1j psi_i) b_i``; works on single instances and on
    stacks with leading trial axes."""
    psi = np.asarray(psi, dtype=float)
    if psi.shape[-1] == 0:
        return a0 + 0.0
    return a0 + np.sum(np.exp(1j * psi)[..., None] * b, axis=-2)


def energy(x):
    """Squared norm along the last axis."""
    return np.sum(x.real * x.real + x.imag * x.imag, axis=-1)


def effective_channel(s: Scenario, a: SteeringAngles, psi, ch: ChannelSet) -> EffectiveChannel:
    psi = np.asarray(psi, dtype=float).reshape(-1)
    if ch.m != s.m_antennas:
        raise ValueError(f"channel has M={ch.m}, scenario expects {s.m_antennas}")
    if psi.shape[0] != ch.n:
        raise ValueError(f"{psi.shape[0]} phases for {ch.n} RIS elements")
    a0, b = path_terms(s, a, ch)
    return EffectiveChannel(combine(a0, b, psi).conj())


def mrt(h: EffectiveChannel) -> Beamformer:
    """Maximal-ratio transmit beamformer ``h_eff / ||h_eff||``."""
    norm = np.linalg.norm(h.h_eff)
    if norm == 0.0:
        raise ZeroChannelError("effective channel is zero")
    return Beamformer(h.h_eff / norm)


def to_db(x):
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(x)
    return out if np.ndim(out) else float(out)


def snr(s: Scenario, h: EffectiveChannel) -> Snr:
    """SNR under MRT, ``||h_eff||^2 / sigma^2``; a zero channel gives 0 (-inf dB)."""
    lin = float(energy(h.row)) / s.noise_power
    return Snr(lin, to_db(lin))


def received_snr(s: Scenario, h: EffectiveChannel, w) -> float:
    """SNR ``|h_eff^H w|^2 / sigma^2`` for an arbitrary beamformer."""
    w = w.w if isinstance(w, Beamformer) else np.asarray(w)
    return float(abs(np.vdot(h.h_eff, w)) ** 2) / s.noise_power
