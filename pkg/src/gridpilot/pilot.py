"""Grid-shaped ternary pilot: mask layout, embedding and raw extraction.

Layout (all coordinates mod gamma, lines line_width wide and centered):

* vertical lines of value -1 at x = 0 and of value 0 at x = gamma/2
* horizontal lines of value +1 at y = 0 and of value 0 at y = gamma/2
* pixels on both a vertical and a horizontal line cycle ((x+y) mod 3) - 1

With this placement each axis carries alternating opposite-sign lines with
period gamma once the detector's component remap is applied, so the line
spectrum consists of odd harmonics of 1/gamma.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .imagery import YUV, PlanarImage
from .qim import QimParams, embed_symbol, extract_symbol

UNSET = np.int8(-2)


@dataclass(frozen=True)
class PilotConfig:
    """Grid geometry and embedding parameters.

    gamma is the spacing between like-valued lines: 100 suits high
    resolution imagery, 50 low resolution. It must be even so the
    half-interval lines fall on integer pixels.
    """

    gamma: int = 100
    line_width: int = 5
    qim: QimParams = field(default_factory=QimParams)
    plane: str = "U"

    def __post_init__(self):
        if self.gamma % 2 != 0:
            raise ConfigError(f"grid interval must be even, got {self.gamma}")
        if self.gamma <= 2 * self.line_width:
            raise ConfigError(
                f"grid interval {self.gamma} must exceed twice the line width"
            )
        if self.line_width < 1:
            raise ConfigError("line width must be at least 1")
        if self.plane != "U":
            raise ConfigError("only the U plane is supported")


@dataclass
class TernaryMask:
    """Per-pixel pilot symbols; UNSET cells leave the image untouched."""

    values: np.ndarray  # int8, UNSET where no line
    gamma: int

    @property
    def set_mask(self) -> np.ndarray:
        return self.values != UNSET


@dataclass
class TernaryField:
    """Per-pixel symbols extracted from an image; every pixel has a value."""

    values: np.ndarray  # int8 in {-1, 0, +1}

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


def _on_lines(coords: np.ndarray, center: int, cfg: PilotConfig) -> np.ndarray:
    half = cfg.line_width // 2
    return ((coords - center + half) % cfg.gamma) < cfg.line_width


def build_mask(width: int, height: int, cfg: PilotConfig) -> TernaryMask:
    """Lay out the pilot grid for a width x height image."""
    if width < 2 * cfg.gamma or height < 2 * cfg.gamma:
        warnings.warn(
            "image smaller than two grid periods; detection may be unreliable",
            stacklevel=2,
        )
    xs = np.arange(width)
    ys = np.arange(height)
    v_neg = _on_lines(xs, 0, cfg)                 # value -1
    v_zero = _on_lines(xs, cfg.gamma // 2, cfg)   # value 0
    h_pos = _on_lines(ys, 0, cfg)                 # value +1
    h_zero = _on_lines(ys, cfg.gamma // 2, cfg)   # value 0
    on_v = (v_neg | v_zero)[None, :]
    on_h = (h_pos | h_zero)[:, None]

    values = np.full((height, width), UNSET, dtype=np.int8)
    v_col = np.where(v_neg, -1, 0).astype(np.int8)
    h_row = np.where(h_pos, 1, 0).astype(np.int8)

    only_v = on_v & ~on_h
    only_h = on_h & ~on_v
    values[only_v] = np.broadcast_to(v_col[None, :], (height, width))[only_v]
    values[only_h] = np.broadcast_to(h_row[:, None], (height, width))[only_h]
    rr, cc = np.nonzero(on_v & on_h)
    values[rr, cc] = ((cc + rr) % 3 - 1).astype(np.int8)
    return TernaryMask(values, cfg.gamma)


def embed_pilot(img: PlanarImage, cfg: PilotConfig) -> PlanarImage:
    """Embed the pilot grid into the U plane; Y and V are untouched."""
    img.require(YUV)
    mask = build_mask(img.width, img.height, cfg)
    out = img.copy()
    sel = mask.set_mask
    u = out.planes[1]
    u[sel] = np.clip(embed_symbol(u[sel], mask.values[sel], cfg.qim), 0.0, 255.0)
    return out


def extract_ternary_field(img: PlanarImage, qim: QimParams = QimParams()) -> TernaryField:
    """Decode every U sample to a ternary symbol.

    Pixels that never carried the pilot (or were resampled by an attack)
    decode to pseudo-random symbols; downstream analysis treats them as
    noise.
    """
    img.require(YUV)
    return TernaryField(extract_symbol(img.planes[1], qim))


def mask_to_text(mask: TernaryMask) -> str:
    """Debug dump: one character per cell ('.' unset, 'n' -1, '0', 'p' +1)."""
    lut = {-2: ".", -1: "n", 0: "0", 1: "p"}
    rows = ("".join(lut[int(v)] for v in row) for row in mask.values)
    return "\n".join(rows) + "\n"
