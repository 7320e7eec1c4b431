"""RIS reflection model.

The reflection amplitude depends on the incidence angles only, which are
taken to be the BS steering angles themselves.  Every element shares that
amplitude, so the reflection matrix is ``beta * diag(exp(1j * psi))`` and
is carried around as its diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi
_SLACK = 1e-12


@dataclass(frozen=True)
class RisConfig:
    """Reflection-gain constants; a passive surface needs ``k1 + k2 == 1``."""

    k1: float = 0.9
    k2: float = 0.1

    def issues(self):
        for name in ("k1", "k2"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                yield "k_out_of_range", f"{name}={v!r} must lie in [0, 1]"
        if not abs(self.k1 + self.k2 - 1.0) <= _SLACK:
            yield "k_sum_not_one", f"k1 + k2 = {self.k1 + self.k2!r}, expected 1"


@dataclass(frozen=True)
class ReflectionMatrix:
    diag: np.ndarray
    beta: float

    @property
    def n(self) -> int:
        return self.diag.shape[0]

    def dense(self) -> np.ndarray:
        return np.diag(self.diag)


def wrap_phases(psi) -> np.ndarray:
    """Reduce phases into ``[0, 2*pi)``."""
    out = np.mod(np.asarray(psi, dtype=float), TWO_PI)
    # np.mod can round tiny negatives up to exactly 2*pi
    out[out >= TWO_PI] = 0.0
    return out


def beta(cfg: RisConfig, theta, phi):
    """Reflection amplitude ``k1 cos(theta) sin(phi) + k2`` (angles in degrees)."""
    b = cfg.k1 * np.cos(np.radians(theta)) * np.sin(np.radians(phi)) + cfg.k2
    b = np.where((b < 0.0) & (b > -_SLACK), 0.0, b)
    b = np.where((b > 1.0) & (b < 1.0 + _SLACK), 1.0, b)
    return b if b.ndim else float(b)


def reflection_matrix(cfg: RisConfig, psi, theta, phi, n=None) -> ReflectionMatrix:
    psi = np.asarray(psi, dtype=float).reshape(-1)
    if n is not None and psi.shape[0] != n:
        raise ValueError(f"phase vector has {psi.shape[0]} entries, expected {n}")
    b = beta(cfg, theta, phi)
    return ReflectionMatrix(diag=b * np.exp(1j * psi), beta=b)
