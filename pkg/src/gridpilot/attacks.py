"""Geometric attack simulation: affine warps, cropping and rectification.

Warps act about the image center in mathematical coordinates (y up); the
conversion to row/column addressing happens inside this module only.
Resampling is inverse-mapping with bilinear interpolation; the output
canvas is the bounding box of the transformed input extent. Margins with
no source pixel are filled with black, which per plane means 0 for RGB
and (0, 128, 128) for YUV.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import ConfigError, DomainError
from .imagery import BLACK, PlanarImage


@dataclass(frozen=True)
class AttackStep:
    """One primitive transform: scale, rotate, shear_x or shear_y."""

    kind: str
    sx: float = 1.0
    sy: float = 1.0
    deg: float = 0.0

    def matrix(self) -> np.ndarray:
        return make_matrix(self)


@dataclass
class CropSpec:
    width: int
    height: int
    mode: str = "center"        # "center" | "at"
    x: int = 0                  # top-left, used when mode == "at"
    y: int = 0


@dataclass
class AttackSpec:
    """Ordered primitive transforms followed by an optional crop."""

    steps: list = field(default_factory=list)
    crop: CropSpec | None = None

    def composite_matrix(self) -> np.ndarray:
        """Product of the step matrices, rightmost applied first."""
        t = np.eye(2)
        for step in self.steps:
            t = step.matrix() @ t
        return t

    def to_json(self) -> str:
        steps = []
        for s in self.steps:
            if s.kind == "scale":
                steps.append({"type": "scale", "sx": s.sx, "sy": s.sy})
            else:
                steps.append({"type": s.kind, "deg": s.deg})
        payload: dict = {"steps": steps}
        if self.crop is not None:
            c: dict = {"mode": self.crop.mode, "w": self.crop.width, "h": self.crop.height}
            if self.crop.mode == "at":
                c["x"] = self.crop.x
                c["y"] = self.crop.y
            payload["crop"] = c
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "AttackSpec":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad attack JSON: {exc}") from exc
        steps = []
        for s in d.get("steps", []):
            kind = s.get("type")
            if kind == "scale":
                steps.append(AttackStep("scale", sx=float(s["sx"]), sy=float(s["sy"])))
            elif kind in ("rotate", "rotation"):
                steps.append(AttackStep("rotate", deg=float(s["deg"])))
            elif kind in ("shear_x", "shear_y"):
                steps.append(AttackStep(kind, deg=float(s["deg"])))
            else:
                raise ConfigError(f"unknown attack step type {kind!r}")
        crop = None
        if "crop" in d and d["crop"]:
            c = d["crop"]
            crop = CropSpec(width=int(c["w"]), height=int(c["h"]),
                            mode=c.get("mode", "center"),
                            x=int(c.get("x", 0)), y=int(c.get("y", 0)))
            if crop.mode not in ("center", "at"):
                raise ConfigError(f"unknown crop mode {crop.mode!r}")
        return cls(steps=steps, crop=crop)


def scaling(sx: float, sy: float) -> AttackStep:
    return AttackStep("scale", sx=sx, sy=sy)


def rotation(deg: float) -> AttackStep:
    return AttackStep("rotate", deg=deg)


def shear_x(deg: float) -> AttackStep:
    return AttackStep("shear_x", deg=deg)


def shear_y(deg: float) -> AttackStep:
    return AttackStep("shear_y", deg=deg)


def make_matrix(step: AttackStep) -> np.ndarray:
    """The 2x2 matrix of a primitive transform."""
    if step.kind == "scale":
        if step.sx <= 0 or step.sy <= 0:
            raise DomainError("scaling factors must be positive")
        return np.array([[step.sx, 0.0], [0.0, step.sy]])
    if step.kind == "rotate":
        r = np.deg2rad(step.deg)
        return np.array([[np.cos(r), -np.sin(r)], [np.sin(r), np.cos(r)]])
    if step.kind in ("shear_x", "shear_y"):
        if abs(step.deg) >= 90.0:
            raise DomainError("shear angle must be below 90 degrees")
        t = np.tan(np.deg2rad(step.deg))
        if step.kind == "shear_x":
            return np.array([[1.0, t], [0.0, 1.0]])
        return np.array([[1.0, 0.0], [t, 1.0]])
    raise ConfigError(f"unknown attack step kind {step.kind!r}")


def _canvas_shape(width: int, height: int, t: np.ndarray) -> tuple[int, int]:
    """Bounding box (height, width) of the transformed pixel-edge extent."""
    corners = np.array([
        [width / 2.0, width / 2.0, -width / 2.0, -width / 2.0],
        [height / 2.0, -height / 2.0, height / 2.0, -height / 2.0],
    ])
    moved = t @ corners
    w_out = int(np.ceil(moved[0].max() - moved[0].min() - 1e-9))
    h_out = int(np.ceil(moved[1].max() - moved[1].min() - 1e-9))
    return max(h_out, 1), max(w_out, 1)


def _warp_plane(plane: np.ndarray, inverse: np.ndarray, out_shape: tuple[int, int],
                origin: tuple[int, int] = (0, 0), canvas: tuple[int, int] | None = None,
                fill: float = 0.0) -> np.ndarray:
    """Inverse-map a plane onto (part of) the output canvas.

    origin is the top-left of the computed window in canvas coordinates;
    canvas defaults to out_shape (full canvas).
    """
    h, w = plane.shape
    ch, cw = canvas if canvas is not None else out_shape
    cr, cc = (h - 1) / 2.0, (w - 1) / 2.0
    crp, ccp = (ch - 1) / 2.0, (cw - 1) / 2.0
    q = inverse
    # out (i, j) global: x' = (j + oc) - ccp, y' = crp - (i + orr)
    # src math: x = q00 x' + q01 y', y = q10 x' + q11 y'
    # src index: r = cr - y, c = cc + x
    orr, oc = origin
    matrix = np.array([[q[1, 1], -q[1, 0]], [-q[0, 1], q[0, 0]]])
    base = np.array([
        cr - q[1, 0] * (oc - ccp) - q[1, 1] * (crp - orr),
        cc + q[0, 0] * (oc - ccp) + q[0, 1] * (crp - orr),
    ])
    shifted = plane if fill == 0.0 else plane - fill
    out = ndimage.affine_transform(
        shifted, matrix, offset=base, output_shape=out_shape,
        order=1, mode="grid-constant", cval=0.0, prefilter=False,
    )
    return out if fill == 0.0 else out + fill


def apply_affine(img: PlanarImage, t: np.ndarray) -> PlanarImage:
    """Warp an image by a 2x2 matrix about its center.

    The output canvas is the bounding box of the transformed input; the
    identity reproduces the input exactly.
    """
    t = np.asarray(t, dtype=float)
    if abs(np.linalg.det(t)) < 1e-12:
        raise DomainError("transform matrix is singular")
    out_shape = _canvas_shape(img.width, img.height, t)
    inverse = np.linalg.inv(t)
    fills = BLACK[img.colorspace]
    planes = [
        _warp_plane(img.planes[k], inverse, out_shape, fill=fills[k])
        for k in range(3)
    ]
    return PlanarImage(np.stack(planes), img.colorspace)


def crop_window(width: int, height: int, crop: CropSpec) -> tuple[int, int, int, int]:
    """Resolve a crop to (row0, col0, height, width), clamped to the canvas."""
    if crop.width <= 0 or crop.height <= 0:
        raise DomainError("crop dimensions must be positive")
    w = crop.width
    h = crop.height
    if w > width or h > height:
        warnings.warn("crop window exceeds canvas; clamping", stacklevel=2)
        w = min(w, width)
        h = min(h, height)
    if crop.mode == "center":
        col0 = (width - w) // 2
        row0 = (height - h) // 2
    else:
        col0, row0 = crop.x, crop.y
        if col0 < 0 or row0 < 0 or col0 + w > width or row0 + h > height:
            warnings.warn("crop window exceeds canvas; clamping", stacklevel=2)
            col0 = min(max(col0, 0), width - w)
            row0 = min(max(row0, 0), height - h)
    return row0, col0, h, w


def crop(img: PlanarImage, spec: CropSpec) -> PlanarImage:
    """Extract a crop window from an image."""
    row0, col0, h, w = crop_window(img.width, img.height, spec)
    return PlanarImage(img.planes[:, row0:row0 + h, col0:col0 + w].copy(),
                       img.colorspace)


def rectify(img: PlanarImage, t_hat: np.ndarray) -> PlanarImage:
    """Undo an estimated transform; margins are filled with black."""
    t_hat = np.asarray(t_hat, dtype=float)
    if abs(np.linalg.det(t_hat)) < 1e-12:
        raise DomainError("estimated matrix is singular")
    return apply_affine(img, np.linalg.inv(t_hat))


def apply_attack(img: PlanarImage, spec: AttackSpec) -> PlanarImage:
    """Composite transform (single resampling pass) followed by the crop.

    When the crop is present only its window of the output canvas is
    actually computed; the values are identical to warping the full
    canvas and slicing.
    """
    t = spec.composite_matrix()
    if not spec.steps:
        out = img.copy()
        return crop(out, spec.crop) if spec.crop is not None else out
    if abs(np.linalg.det(t)) < 1e-12:
        raise DomainError("composite attack matrix is singular")
    canvas = _canvas_shape(img.width, img.height, t)
    inverse = np.linalg.inv(t)
    fills = BLACK[img.colorspace]
    if spec.crop is None:
        window = (0, 0, canvas[0], canvas[1])
    else:
        window = crop_window(canvas[1], canvas[0], spec.crop)
    row0, col0, h, w = window
    planes = [
        _warp_plane(img.planes[k], inverse, (h, w), origin=(row0, col0),
                    canvas=canvas, fill=fills[k])
        for k in range(3)
    ]
    return PlanarImage(np.stack(planes), img.colorspace)


def content_mask(img: PlanarImage, tol: float = 0.75) -> np.ndarray:
    """Pixels that look like warp fill (black) rather than content.

    Returns a boolean array, True where all three planes sit within tol of
    the colorspace's black value. Interpolation blends edges, so the mask
    is exact only for interior fill, which is what the estimator needs.
    """
    fills = BLACK[img.colorspace]
    m = np.ones(img.planes.shape[1:], dtype=bool)
    for k in range(3):
        m &= np.abs(img.planes[k] - fills[k]) < tol
    return m
