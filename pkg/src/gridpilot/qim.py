"""Scalar ternary quantization index modulation.

A symbol p in {-1, 0, +1} selects one of three interleaved quantization
lattices with step delta; embedding snaps the sample to the nearest point
of the selected lattice and extraction reads back which lattice the sample
is closest to.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

TERNARY = (-1, 0, 1)


@dataclass(frozen=True)
class QimParams:
    """Quantization step. The default step of 9 gives three lattices 3 apart."""

    delta: float = 9.0

    def __post_init__(self):
        if not (self.delta > 0):
            raise ConfigError(f"delta must be positive, got {self.delta}")


def embed_symbol(u, p, params: QimParams = QimParams()):
    """Quantize sample(s) u onto the lattice selected by symbol(s) p.

    u' = delta * (floor(u/delta - (p+1)/3 + 0.5) + (p+1)/3)

    Accepts scalars or same-shaped arrays. The result is not clamped; values
    just outside [0, 255] are clamped by the image-plane writer instead.
    """
    u_arr = np.asarray(u, dtype=np.float64)
    p_arr = np.asarray(p)
    if not np.isin(p_arr, TERNARY).all():
        raise DomainError(f"symbol must be in {TERNARY}")
    if not np.isfinite(u_arr).all():
        raise DomainError("sample value must be finite")
    coset = (p_arr.astype(np.float64) + 1.0) / 3.0
    out = params.delta * (np.floor(u_arr / params.delta - coset + 0.5) + coset)
    if np.isscalar(u) or u_arr.ndim == 0:
        return float(out)
    return out


def extract_symbol(u, params: QimParams = QimParams()):
    """Read the ternary symbol from sample(s) u.

    p = (floor(3u/delta + 0.5) mod 3) - 1, with a non-negative mod so
    negative samples decode consistently. Total function: any finite sample
    decodes to some symbol.
    """
    u_arr = np.asarray(u, dtype=np.float64)
    sym = np.floor(3.0 * u_arr / params.delta + 0.5) % 3.0 - 1.0
    if np.isscalar(u) or u_arr.ndim == 0:
        return int(sym)
    return sym.astype(np.int8)
