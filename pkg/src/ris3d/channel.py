"""Small-scale channel realizations.

Every Monte Carlo trial gets its own generator derived from ``(seed,
trial_index)`` so trials can be evaluated in any order or in parallel
with identical results.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class ChannelSet:
    """One realization: ``h_r`` (N x M, BS->RIS), ``h_d`` (M, BS->UE) and
    ``g`` (N, RIS->UE)."""

    h_r: np.ndarray
    h_d: np.ndarray
    g: np.ndarray

    @property
    def m(self) -> int:
        return self.h_d.shape[0]

    @property
    def n(self) -> int:
        return self.g.shape[0]

    def check(self, m: int | None = None, n: int | None = None) -> "ChannelSet":
        m = self.m if m is None else m
        n = self.n if n is None else n
        if self.h_d.shape != (m,) or self.g.shape != (n,) or self.h_r.shape != (n, m):
            raise ValueError(
                f"channel shapes h_r{self.h_r.shape} h_d{self.h_d.shape} g{self.g.shape}"
                f" do not match M={m}, N={n}"
            )
        for name in ("h_r", "h_d", "g"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} has non-finite entries")
        return self

    def truncate(self, n: int) -> "ChannelSet":
        """Keep the first ``n`` RIS elements."""
        return ChannelSet(self.h_r[:n], self.h_d, self.g[:n])


@dataclass(frozen=True)
class ChannelModel:
    kind: str = "iid_complex_gaussian"
    fixed: ChannelSet | None = None

    def __post_init__(self):
        if self.kind not in ("iid_complex_gaussian", "fixed"):
            raise ValueError(f"unknown channel model {self.kind!r}")
        if self.kind == "fixed":
            if self.fixed is None:
                raise ValueError("fixed channel model needs explicit matrices")
            self.fixed.check()


IID = ChannelModel()


def fixed_model(h_r, h_d, g) -> ChannelModel:
    ch = ChannelSet(
        np.asarray(h_r, dtype=complex).reshape(len(g), len(h_d)),
        np.asarray(h_d, dtype=complex).reshape(-1),
        np.asarray(g, dtype=complex).reshape(-1),
    )
    return ChannelModel("fixed", ch)


def derive_stream(seed: int, trial_index: int, *subkeys: int) -> np.random.Generator:
    """Independent generator for one trial.

    The stream is a pure function of its key, so re-deriving trial 5 after
    drawing trials 0-4 gives the same stream as deriving it directly.
    Extra ``subkeys`` split a trial into further independent streams.
    """
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(trial_index, *subkeys))
    return np.random.Generator(np.random.PCG64(ss))


def draw(model: ChannelModel, m: int, n: int, rng: np.random.Generator | None = None) -> ChannelSet:
    """Draw a ChannelSet of size M x N.

    For the iid model, ``h_d`` is drawn first, then one block per RIS
    element holding that element's row of ``h_r`` followed by its ``g``
    entry.  Draws for different N from the same stream are therefore
    nested: the first N elements never depend on how many follow.
    """
    if m < 1 or n < 0:
        raise ValueError(f"need m >= 1 and n >= 0, got m={m}, n={n}")
    if model.kind == "fixed":
        return model.fixed.check(m, n)
    if rng is None:
        raise ValueError("iid channel draw needs a random stream")
    scale = np.sqrt(0.5)
    h_d = rng.standard_normal((m, 2)) * scale
    blocks = rng.standard_normal((n, m + 1, 2)) * scale
    h_d = h_d[:, 0] + 1j * h_d[:, 1]
    blocks = blocks[..., 0] + 1j * blocks[..., 1]
    return ChannelSet(h_r=blocks[:, :m].copy(), h_d=h_d, g=blocks[:, m].copy())


# -- plain-text matrix format --------------------------------------------------
#
#   # comment lines are ignored
#   [h_d]
#   0.5+1.25j
#   -1.0-0.0j
#   [h_r]
#   1+0j 0.5-0.5j
#   [g]
#   1+0j
#
# Each section holds rows of whitespace-separated complex numbers written as
# ``re+imj``.  Vectors are written one entry per row; any layout is accepted on
# read.  ``h_r`` must have as many rows as ``g`` has entries.

_SECTIONS = ("h_d", "h_r", "g")


def _fmt_complex(z: complex) -> str:
    return f"{z.real!r}{z.imag:+}j"


def dumps_channel(ch: ChannelSet) -> str:
    lines = []
    for name in _SECTIONS:
        lines.append(f"[{name}]")
        arr = getattr(ch, name)
        rows = arr if arr.ndim == 2 else arr.reshape(-1, 1)
        for row in rows:
            lines.append(" ".join(_fmt_complex(complex(z)) for z in row))
    return "\n".join(lines) + "\n"


def loads_channel(text: str) -> ChannelSet:
    rows: dict[str, list[list[complex]]] = {}
    current = None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current not in _SECTIONS:
                raise ValueError(f"line {lineno}: unknown section [{current}]")
            rows[current] = []
            continue
        if current is None:
            raise ValueError(f"line {lineno}: data before any section header")
        try:
            rows[current].append([complex(tok) for tok in line.split()])
        except ValueError:
            raise ValueError(f"line {lineno}: cannot parse complex values in {line!r}") from None
    missing = [s for s in _SECTIONS if s not in rows]
    if missing:
        raise ValueError(f"missing sections: {', '.join(missing)}")
    h_d = np.array([z for r in rows["h_d"] for z in r], dtype=complex)
    g = np.array([z for r in rows["g"] for z in r], dtype=complex)
    widths = {len(r) for r in rows["h_r"]}
    if len(widths) > 1:
        raise ValueError("h_r rows have unequal lengths")
    if widths and widths != {len(h_d)}:
        raise ValueError(f"h_r rows have {widths.pop()} entries, h_d has {len(h_d)}")
    h_r = np.array(rows["h_r"], dtype=complex).reshape(len(rows["h_r"]), len(h_d))
    return ChannelSet(h_r=h_r, h_d=h_d, g=g).check()


def load_channel(path) -> ChannelSet:
    return loads_channel(Path(path).read_text())


def save_channel(ch: ChannelSet, path) -> None:
    Path(path).write_text(dumps_channel(ch))
