"""Synthetic test images with natural-image-like statistics.

The standard photographic test sets are not redistributable, so the
evaluation pipeline ships a generator: band-limited noise at several
scales plus smooth gradients for luminance, and softer textured chroma.
Deterministic for a given seed and size.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .imagery import YUV, PlanarImage, quantize_planes, yuv_to_rgb


def generate_fixture(width: int, height: int, seed: int) -> PlanarImage:
    """An RGB image of the given size with integer-valued samples."""
    rng = np.random.default_rng(seed)
    shape = (height, width)

    def band(sigma, amp):
        return ndimage.gaussian_filter(rng.normal(size=shape), sigma) * amp

    gx = np.linspace(-1.0, 1.0, width)[None, :]
    gy = np.linspace(-1.0, 1.0, height)[:, None]
    y = (
        120.0
        + band(2, 20)
        + band(8, 30)
        + band(32, 45)
        + rng.normal() * 20 * gx
        + rng.normal() * 20 * gy
    )
    # fine-grained chroma texture (sensor-noise-like) keeps extracted
    # symbols decorrelated between neighboring pixels
    u = 128.0 + band(1.5, 9) + band(6, 8) + band(24, 14) + rng.normal() * 8 * gx
    v = 128.0 + band(1.5, 9) + band(6, 8) + band(24, 14) + rng.normal() * 8 * gy
    yuv = np.stack([
        np.clip(y, 16.0, 240.0),
        np.clip(u, 48.0, 208.0),
        np.clip(v, 48.0, 208.0),
    ])
    rgb = yuv_to_rgb(PlanarImage(yuv, YUV))
    return PlanarImage(quantize_planes(rgb.planes), "RGB")
