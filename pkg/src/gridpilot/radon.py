"""Discrete Radon transform by rotate-and-sum with bilinear sampling.

Geometry: mathematical coordinates centered on the field (x right, y up),
projection angle phi in degrees measured counter-clockwise from the x axis.
R(phi, rho) is the sum of bilinear samples taken at unit steps along the
line x*cos(phi) + y*sin(phi) = rho, so a family of lines in direction
theta concentrates at phi = theta - 90 (mod 180). Samples outside the
field contribute zero.

Two equivalent backends compute the same sampling lattice: a parallel
numba kernel (default) and scipy.ndimage.affine_transform. Results are
deterministic for a fixed backend regardless of thread count because each
(angle, offset) sum is accumulated in a fixed order.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ConfigError, ShapeError

try:  # pragma: no cover - exercised implicitly everywhere
    from numba import njit, prange

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

_BACKEND = os.environ.get("GRIDPILOT_RADON_BACKEND", "numba" if _HAVE_NUMBA else "scipy")


def set_backend(name: str):
    """Select 'numba' or 'scipy'. Both produce the same projections."""
    global _BACKEND
    if name not in ("numba", "scipy"):
        raise ConfigError(f"unknown radon backend {name!r}")
    if name == "numba" and not _HAVE_NUMBA:
        raise ConfigError("numba is not available")
    _BACKEND = name


def get_backend() -> str:
    return _BACKEND


@dataclass
class Sinogram:
    """Radon coefficients R(phi, rho) plus axis metadata.

    coeffs is indexed [offset, angle] so one column holds the projection
    profile of a single angle. support marks the offsets whose line crosses
    the field rectangle; entries outside it are zero by construction.
    """

    angles: np.ndarray   # degrees, uniform over [0, 180)
    offsets: np.ndarray  # pixels, signed, zero at the field center
    coeffs: np.ndarray   # (len(offsets), len(angles))
    support: np.ndarray  # bool, same shape as coeffs
    zero_variance: np.ndarray | None = None  # per-angle flag set by normalization

    def angle_index(self, phi: float) -> int:
        step = float(self.angles[1] - self.angles[0]) if len(self.angles) > 1 else 180.0
        return int(round((phi % 180.0) / step)) % len(self.angles)

    def column(self, phi: float) -> np.ndarray:
        return self.coeffs[:, self.angle_index(phi)]


if _HAVE_NUMBA:

    @njit(parallel=True, fastmath=False, cache=True)
    def _project_numba(field, cos_a, sin_a, side):  # pragma: no cover - jitted
        h, w = field.shape
        n_ang = cos_a.shape[0]
        out = np.zeros((side, n_ang))
        c0 = (side - 1) / 2.0
        cr = (h - 1) / 2.0
        cc = (w - 1) / 2.0
        for k in prange(n_ang):
            ca = cos_a[k]
            sa = sin_a[k]
            for j in range(side):
                xp = j - c0
                acc = 0.0
                for i in range(side):
                    yp = c0 - i
                    x = xp * ca - yp * sa
                    y = xp * sa + yp * ca
                    c = cc + x
                    r = cr - y
                    r0 = int(np.floor(r))
                    cf = int(np.floor(c))
                    fr = r - r0
                    fc = c - cf
                    v = 0.0
                    if 0 <= r0 < h:
                        if 0 <= cf < w:
                            v += (1.0 - fr) * (1.0 - fc) * field[r0, cf]
                        if 0 <= cf + 1 < w:
                            v += (1.0 - fr) * fc * field[r0, cf + 1]
                    if 0 <= r0 + 1 < h:
                        if 0 <= cf < w:
                            v += fr * (1.0 - fc) * field[r0 + 1, cf]
                        if 0 <= cf + 1 < w:
                            v += fr * fc * field[r0 + 1, cf + 1]
                    acc += v
                out[j, k] = acc
        return out


def _project_scipy(field, cos_a, sin_a, side):
    h, w = field.shape
    c0 = (side - 1) / 2.0
    cr = (h - 1) / 2.0
    cc = (w - 1) / 2.0
    out = np.empty((side, len(cos_a)))
    for k in range(len(cos_a)):
        ca, sa = cos_a[k], sin_a[k]
        matrix = np.array([[ca, -sa], [sa, ca]])
        offset = np.array([cr - c0 * (ca - sa), cc - c0 * (sa + ca)])
        rot = ndimage.affine_transform(
            field, matrix, offset=offset, output_shape=(side, side),
            order=1, mode="grid-constant", cval=0.0, prefilter=False,
        )
        out[:, k] = rot.sum(axis=0)
    return out


def _canvas_side(width: int, height: int) -> int:
    side = int(np.ceil(np.hypot(width, height)))
    return side + 1 if side % 2 == 0 else side  # odd, so rho = 0 is sampled


def support_mask(width: int, height: int, angles_deg: np.ndarray,
                 offsets: np.ndarray) -> np.ndarray:
    """Offsets whose projection line crosses the pixel-center rectangle."""
    rad = np.deg2rad(angles_deg)
    half = ((width - 1) * np.abs(np.cos(rad)) + (height - 1) * np.abs(np.sin(rad))) / 2.0
    return np.abs(offsets)[:, None] <= (half[None, :] + 0.5)


def radon_columns(field: np.ndarray, angles_deg: np.ndarray) -> Sinogram:
    """Radon transform restricted to an explicit list of angles."""
    field = np.ascontiguousarray(field, dtype=np.float64)
    if field.ndim != 2 or field.size == 0:
        raise ShapeError("field must be a non-empty 2-D array")
    if not np.isfinite(field).all():
        raise ShapeError("field must be finite")
    angles_deg = np.asarray(angles_deg, dtype=np.float64)
    h, w = field.shape
    side = _canvas_side(w, h)
    rad = np.deg2rad(angles_deg)
    cos_a, sin_a = np.cos(rad), np.sin(rad)
    if _BACKEND == "numba":
        coeffs = _project_numba(field, cos_a, sin_a, side)
    else:
        coeffs = _project_scipy(field, cos_a, sin_a, side)
    offsets = np.arange(side, dtype=np.float64) - (side - 1) / 2.0
    return Sinogram(
        angles=angles_deg,
        offsets=offsets,
        coeffs=coeffs,
        support=support_mask(w, h, angles_deg, offsets),
    )


def radon_transform(field: np.ndarray, angle_step: float = 0.5) -> Sinogram:
    """Full transform over [0, 180) degrees at the given step."""
    if angle_step <= 0 or abs(180.0 / angle_step - round(180.0 / angle_step)) > 1e-9:
        raise ConfigError(f"angle step {angle_step} must divide 180 evenly")
    return radon_columns(field, np.arange(0.0, 180.0, angle_step))


def normalize_sinogram(s: Sinogram) -> Sinogram:
    """Standardize each angle column over its valid support.

    Columns with zero variance are set to zero and flagged. Entries
    outside the support stay zero so they never enter later statistics.
    """
    coeffs = np.zeros_like(s.coeffs)
    flags = np.zeros(len(s.angles), dtype=bool)
    for k in range(len(s.angles)):
        m = s.support[:, k]
        col = s.coeffs[m, k]
        mu = col.mean()
        sd = col.std()
        if sd <= 1e-12:
            flags[k] = True
            continue
        coeffs[m, k] = (col - mu) / sd
    return Sinogram(s.angles, s.offsets, coeffs, s.support, zero_variance=flags)


def threshold_denoise(s: Sinogram, tau: float = 1.5) -> Sinogram:
    """Zero normalized coefficients with magnitude <= tau.

    Weak coefficients come from the cover image content; the surviving
    entries are the pilot line responses.
    """
    coeffs = np.where(np.abs(s.coeffs) <= tau, 0.0, s.coeffs)
    return Sinogram(s.angles, s.offsets, coeffs, s.support, s.zero_variance)


def sinogram_to_csv(s: Sinogram) -> str:
    """Debug dump: angle,offset,value rows (support entries only)."""
    lines = ["angle,offset,value"]
    for k, phi in enumerate(s.angles):
        for j in np.nonzero(s.support[:, k])[0]:
            lines.append(f"{phi},{s.offsets[j]},{s.coeffs[j, k]!r}")
    return "\n".join(lines) + "\n"
