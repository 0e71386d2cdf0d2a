"""Tiled block QIM watermark in the luminance plane.

This is a deliberately simple message carrier used to demonstrate
end-to-end synchronization: the 300-bit message is laid out on a block
grid inside a square tile that repeats across the image, phase locked to
the pilot grid (tile corners coincide with pilot line intersections).
After an attacked image has been rectified with the estimated matrix, the
pilot phase gives the tile origin and every visible copy of a block votes
for its bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, ShapeError
from .imagery import YUV, PlanarImage
from .qim import QimParams, embed_symbol, extract_symbol

MESSAGE_BITS = 300


def _block_grid(tile_px: int, n_bits: int) -> int:
    """Smallest divisor b of tile_px with b*b >= n_bits."""
    for b in range(1, tile_px + 1):
        if tile_px % b == 0 and b * b >= n_bits:
            return b
    raise ConfigError(f"tile size {tile_px} cannot hold {n_bits} bits")


@dataclass
class WatermarkMessage:
    """A 300-bit message plus its tiling geometry.

    erasures marks bits that could not be decoded; they count as errors.
    """

    bits: np.ndarray
    tile_px: int = 100
    erasures: np.ndarray | None = None

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=np.int8)
        if self.bits.shape != (MESSAGE_BITS,):
            raise DomainError(f"message must be exactly {MESSAGE_BITS} bits")
        if not np.isin(self.bits, (0, 1)).all():
            raise DomainError("message bits must be 0 or 1")
        if self.tile_px < 1:
            raise ConfigError("tile size must be positive")
        self.grid_n = _block_grid(self.tile_px, MESSAGE_BITS)
        self.block_px = self.tile_px // self.grid_n

    @classmethod
    def random(cls, seed: int, tile_px: int = 100) -> "WatermarkMessage":
        rng = np.random.default_rng(seed)
        return cls(rng.integers(0, 2, MESSAGE_BITS).astype(np.int8), tile_px)

    @classmethod
    def from_text(cls, text: str, tile_px: int = 100) -> "WatermarkMessage":
        bits = [c for c in text.strip() if not c.isspace()]
        if len(bits) != MESSAGE_BITS or any(c not in "01" for c in bits):
            raise DomainError(f"message file must hold {MESSAGE_BITS} '0'/'1' characters")
        return cls(np.array([int(c) for c in bits], dtype=np.int8), tile_px)

    def to_text(self) -> str:
        return "".join(str(int(b)) for b in self.bits) + "\n"


def _bit_indices(shape: tuple[int, int], msg: WatermarkMessage,
                 dx: float = 0.0, dy: float = 0.0) -> np.ndarray:
    h, w = shape
    xs = (np.arange(w) - dx) % msg.tile_px
    ys = (np.arange(h) - dy) % msg.tile_px
    bx = np.floor(xs).astype(np.int64) % msg.tile_px // msg.block_px
    by = np.floor(ys).astype(np.int64) % msg.tile_px // msg.block_px
    return by[:, None] * msg.grid_n + bx[None, :]


def embed_watermark(img: PlanarImage, msg: WatermarkMessage,
                    qim: QimParams = QimParams()) -> PlanarImage:
    """Embed the message into the Y plane, one bit per block, tiled.

    Bit values are carried as QIM symbols -1 (bit 0) and +1 (bit 1).
    Blocks past the message length are left untouched. Deterministic.
    """
    img.require(YUV)
    if img.width < msg.tile_px or img.height < msg.tile_px:
        raise ShapeError(
            f"image must be at least one {msg.tile_px}px tile in each dimension"
        )
    idx = _bit_indices((img.height, img.width), msg)
    sel = idx < MESSAGE_BITS
    symbols = (2 * msg.bits[idx[sel]] - 1).astype(np.int8)
    out = img.copy()
    y = out.planes[0]
    y[sel] = np.clip(embed_symbol(y[sel], symbols, qim), 0.0, 255.0)
    return out


def extract_watermark(img: PlanarImage, phase: tuple[float, float],
                      qim: QimParams = QimParams(), tile_px: int = 100,
                      exclude: np.ndarray | None = None) -> WatermarkMessage:
    """Majority-vote decode of the tiled message from a rectified image.

    phase = (dx, dy) is the tile origin modulo the tile size, obtained
    from pilot analysis of the same image. Pixels decoding to symbol 0
    abstain; ``exclude`` (typically the black warp margins) removes pixels
    from the vote entirely. Bits with no decisive vote are erasures.
    """
    img.require(YUV)
    ref = WatermarkMessage(np.zeros(MESSAGE_BITS, dtype=np.int8), tile_px)
    idx = _bit_indices((img.height, img.width), ref, phase[0], phase[1])
    sym = extract_symbol(img.planes[0], qim)
    valid = idx < MESSAGE_BITS
    if exclude is not None:
        valid &= ~exclude
    pos = np.bincount(idx[valid & (sym == 1)], minlength=MESSAGE_BITS + 1)[:MESSAGE_BITS]
    neg = np.bincount(idx[valid & (sym == -1)], minlength=MESSAGE_BITS + 1)[:MESSAGE_BITS]
    bits = np.zeros(MESSAGE_BITS, dtype=np.int8)
    bits[pos > neg] = 1
    erasures = pos == neg
    return WatermarkMessage(bits, tile_px, erasures=erasures)


def ber(extracted: WatermarkMessage, truth: WatermarkMessage) -> float:
    """Fraction of wrong bits; erasures count as errors."""
    if extracted.bits.shape != truth.bits.shape:
        raise DomainError("message lengths differ")
    wrong = extracted.bits != truth.bits
    if extracted.erasures is not None:
        wrong = wrong | extracted.erasures
    return float(wrong.mean())
