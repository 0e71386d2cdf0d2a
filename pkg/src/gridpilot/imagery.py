"""Planar image container, PNG/PPM codecs, colorspace conversion and PSNR.

Images are stored as three full-resolution float planes so that embedding
arithmetic stays exact; quantization to 8 bits happens only when encoding
to a file format.
"""

from __future__ import annotations

import io
import math
import struct
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    ColorspaceError,
    ConfigError,
    DecodeError,
    ShapeError,
    UnsupportedFormatError,
)

RGB = "RGB"
YUV = "YUV"

# BT.601 full-range analysis matrix; chroma planes offset by +128.
_RGB_TO_YUV = np.array([
    [0.299, 0.587, 0.114],
    [-0.168736, -0.331264, 0.5],
    [0.5, -0.418688, -0.081312],
])
_YUV_TO_RGB = np.linalg.inv(_RGB_TO_YUV)
_YUV_OFFSET = np.array([0.0, 128.0, 128.0])

#: Per-plane value of a black pixel in each colorspace.
BLACK = {RGB: (0.0, 0.0, 0.0), YUV: (0.0, 128.0, 128.0)}


@dataclass
class PlanarImage:
    """Three same-sized real-valued planes plus a colorspace tag.

    Planes are indexed ``[plane, row, col]`` with row 0 at the top. Samples
    are nominally in [0, 255] but are only clamped at encode time.
    """

    planes: np.ndarray
    colorspace: str = RGB

    def __post_init__(self):
        self.planes = np.asarray(self.planes, dtype=np.float64)
        if self.planes.ndim != 3 or self.planes.shape[0] != 3:
            raise ShapeError(f"expected (3, H, W) planes, got {self.planes.shape}")
        if self.planes.shape[1] < 1 or self.planes.shape[2] < 1:
            raise ShapeError("image dimensions must be at least 1x1")
        if self.colorspace not in (RGB, YUV):
            raise ColorspaceError(f"unknown colorspace {self.colorspace!r}")
        if not np.isfinite(self.planes).all():
            raise ShapeError("image samples must be finite")

    @property
    def width(self) -> int:
        return self.planes.shape[2]

    @property
    def height(self) -> int:
        return self.planes.shape[1]

    def copy(self) -> "PlanarImage":
        return PlanarImage(self.planes.copy(), self.colorspace)

    def require(self, colorspace: str):
        if self.colorspace != colorspace:
            raise ColorspaceError(
                f"operation requires {colorspace}, image is {self.colorspace}"
            )


def quantize_planes(planes: np.ndarray) -> np.ndarray:
    """Clamp to [0, 255] and round to whole sample values."""
    return np.clip(np.floor(planes + 0.5), 0.0, 255.0)


def _from_interleaved(arr: np.ndarray) -> PlanarImage:
    return PlanarImage(np.moveaxis(arr.astype(np.float64), 2, 0), RGB)


def _to_interleaved_u8(img: PlanarImage) -> np.ndarray:
    return np.moveaxis(quantize_planes(img.planes), 0, 2).astype(np.uint8)


def decode_image(data: bytes) -> PlanarImage:
    """Decode a PNG or PPM byte stream into an RGB image.

    Raises DecodeError for malformed streams and UnsupportedFormatError for
    bit depths other than 8 or formats with alpha.
    """
    if data[:2] in (b"P6", b"P3"):
        return _decode_ppm(data)
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        return _decode_png(data)
    raise DecodeError("not a PNG or PPM stream", offset=0)


def _decode_png(data: bytes) -> PlanarImage:
    if len(data) < 33:
        raise DecodeError("truncated PNG header", offset=len(data))
    bit_depth, color_type = struct.unpack_from("BB", data, 24)
    if bit_depth != 8:
        raise UnsupportedFormatError(f"unsupported PNG bit depth {bit_depth}")
    if color_type not in (0, 2, 3):
        raise UnsupportedFormatError(
            f"unsupported PNG color type {color_type} (alpha is not supported)"
        )
    try:
        with Image.open(io.BytesIO(data)) as im:
            im.load()
            if im.mode != "RGB":
                im = im.convert("RGB")
            arr = np.asarray(im)
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"malformed PNG stream: {exc}") from exc
    return _from_interleaved(arr)


def _decode_ppm(data: bytes) -> PlanarImage:
    magic = data[:2].decode("ascii")
    pos = 2
    fields = []
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            nl = data.find(b"\n", pos)
            if nl < 0:
                raise DecodeError("unterminated PPM comment", offset=pos)
            pos = nl + 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if pos == start:
            raise DecodeError("truncated PPM header", offset=pos)
        try:
            fields.append(int(data[start:pos]))
        except ValueError:
            raise DecodeError("malformed PPM header token", offset=start) from None
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise DecodeError("bad PPM dimensions", offset=2)
    if maxval != 255:
        raise UnsupportedFormatError(f"unsupported PPM maxval {maxval}")
    n = width * height * 3
    if magic == "P6":
        pos += 1  # single whitespace after maxval
        raster = data[pos : pos + n]
        if len(raster) < n:
            raise DecodeError("truncated PPM raster", offset=pos + len(raster))
        arr = np.frombuffer(raster, dtype=np.uint8, count=n)
    else:  # P3
        try:
            values = data[pos:].split()
            arr = np.array([int(v) for v in values[:n]], dtype=np.int64)
        except ValueError:
            raise DecodeError("malformed P3 sample", offset=pos) from None
        if arr.size < n:
            raise DecodeError("truncated P3 raster", offset=len(data))
        if arr.min() < 0 or arr.max() > 255:
            raise DecodeError("P3 sample out of range", offset=pos)
    return _from_interleaved(arr.reshape(height, width, 3))


def encode_image(img: PlanarImage, fmt: str = "png") -> bytes:
    """Encode an RGB image as PNG or binary PPM (P6) bytes."""
    img.require(RGB)
    arr = _to_interleaved_u8(img)
    fmt = fmt.lower()
    if fmt == "png":
        buf = io.BytesIO()
        Image.fromarray(arr, mode="RGB").save(buf, format="PNG")
        return buf.getvalue()
    if fmt == "ppm":
        header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
        return header + arr.tobytes()
    raise ConfigError(f"unknown image format {fmt!r}")


def load_image(path) -> PlanarImage:
    with open(path, "rb") as fh:
        return decode_image(fh.read())


def save_image(img: PlanarImage, path):
    path = str(path)
    fmt = "ppm" if path.lower().endswith((".ppm", ".pnm")) else "png"
    with open(path, "wb") as fh:
        fh.write(encode_image(img, fmt))


def rgb_to_yuv(img: PlanarImage) -> PlanarImage:
    """BT.601 full-range RGB to YUV; U and V are offset by +128."""
    img.require(RGB)
    flat = img.planes.reshape(3, -1)
    out = _RGB_TO_YUV @ flat + _YUV_OFFSET[:, None]
    return PlanarImage(out.reshape(img.planes.shape), YUV)


def yuv_to_rgb(img: PlanarImage) -> PlanarImage:
    """Inverse of rgb_to_yuv, clamped to [0, 255]."""
    img.require(YUV)
    flat = img.planes.reshape(3, -1) - _YUV_OFFSET[:, None]
    out = np.clip(_YUV_TO_RGB @ flat, 0.0, 255.0)
    return PlanarImage(out.reshape(img.planes.shape), RGB)


def psnr(a: PlanarImage, b: PlanarImage) -> float:
    """Peak signal-to-noise ratio in dB over all three planes, peak 255.

    Returns math.inf when the images are identical.
    """
    if a.planes.shape != b.planes.shape:
        raise ShapeError(f"shape mismatch {a.planes.shape} vs {b.planes.shape}")
    if a.colorspace != b.colorspace:
        raise ShapeError("colorspace mismatch")
    mse = float(np.mean((a.planes - b.planes) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0 ** 2 / mse)
