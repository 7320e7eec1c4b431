"""Parametric 3D radiation pattern of the base-station array.

Attenuations are in dB and follow the usual 12*(offset/beamwidth)^2 law,
optionally clamped by sidelobe floors.  All angles are in degrees; only
differences of angles enter, so no radian conversion is needed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

INF = math.inf


@dataclass(frozen=True)
class AntennaPattern:
    """3dB beamwidths, peak gain and sidelobe floors of the BS array.

    Parameters
    ----------
    theta_3db, phi_3db : float
        Vertical and horizontal half-power beamwidths in degrees.
    a_max_db : float
        Maximum directional gain in dB.
    a_m_v_db, a_m_h_db, a_m_db : float
        Vertical, horizontal and total sidelobe floors in dB.  ``inf``
        disables the corresponding clamp.
    """

    theta_3db: float = 15.0
    phi_3db: float = 65.0
    a_max_db: float = 0.0
    a_m_v_db: float = INF
    a_m_h_db: float = INF
    a_m_db: float = INF

    @property
    def alpha_max(self) -> float:
        return 10.0 ** (self.a_max_db / 10.0)

    @property
    def unclamped(self) -> bool:
        return all(math.isinf(v) for v in (self.a_m_v_db, self.a_m_h_db, self.a_m_db))

    def issues(self):
        """Yield ``(code, message)`` pairs for every violated invariant."""
        for name in ("theta_3db", "phi_3db"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                yield "beamwidth_nonpositive", f"{name}={v!r} must be finite and > 0"
        if not math.isfinite(self.a_max_db):
            yield "gain_not_finite", f"a_max_db={self.a_max_db!r} must be finite"
        for name in ("a_m_v_db", "a_m_h_db", "a_m_db"):
            v = getattr(self, name)
            if math.isnan(v) or v < 0 or v == -INF:
                yield "sidelobe_negative", f"{name}={v!r} must be >= 0 dB or inf"


def _clamped_square_law(offset, beamwidth, floor):
    att = 12.0 * (np.asarray(offset, dtype=float) / beamwidth) ** 2
    return np.minimum(att, floor)


def attenuation_vertical_db(p: AntennaPattern, theta_bs, theta_o):
    """Vertical attenuation ``min(12 ((theta_bs - theta_o)/theta_3db)^2, A_m^V)``."""
    out = _clamped_square_law(np.subtract(theta_bs, theta_o), p.theta_3db, p.a_m_v_db)
    return out if out.ndim else float(out)


def attenuation_horizontal_db(p: AntennaPattern, phi_bs, phi_o):
    """Horizontal attenuation ``min(12 ((phi_bs - phi_o)/phi_3db)^2, A_m^H)``."""
    out = _clamped_square_law(np.subtract(phi_bs, phi_o), p.phi_3db, p.a_m_h_db)
    return out if out.ndim else float(out)


def gain_db(p: AntennaPattern, theta_bs, phi_bs, theta_o, phi_o):
    total = attenuation_vertical_db(p, theta_bs, theta_o) + attenuation_horizontal_db(
        p, phi_bs, phi_o
    )
    out = p.a_max_db - np.minimum(total, p.a_m_db)
    return out if np.ndim(out) else float(out)


def gain_linear(p: AntennaPattern, theta_bs, phi_bs, theta_o, phi_o):
    """Linear BS gain toward a target at ``(theta_o, phi_o)`` when steered
    to ``(theta_bs, phi_bs)``.

    With all floors infinite this is the closed form
    ``alpha_max * 10**(-1.2 * (u**2 + v**2))`` with ``u``, ``v`` the offsets
    normalised by the beamwidths; otherwise the clamped dB composition is
    converted to linear scale.  Accepts scalars or broadcastable arrays.
    """
    if p.unclamped:
        u = np.subtract(theta_bs, theta_o) / p.theta_3db
        v = np.subtract(phi_bs, phi_o) / p.phi_3db
        out = p.alpha_max * 10.0 ** (-1.2 * (u * u + v * v))
    else:
        out = 10.0 ** (np.asarray(gain_db(p, theta_bs, phi_bs, theta_o, phi_o)) / 10.0)
    return out if np.ndim(out) else float(out)
