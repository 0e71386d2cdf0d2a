import math

import numpy as np
import pytest

from gridpilot.errors import (
    ColorspaceError,
    DecodeError,
    ShapeError,
    UnsupportedFormatError,
)
from gridpilot.imagery import (
    PlanarImage,
    decode_image,
    encode_image,
    psnr,
    quantize_planes,
    rgb_to_yuv,
    yuv_to_rgb,
)

from conftest import gray_image


def test_planar_image_validation():
    with pytest.raises(ShapeError):
        PlanarImage(np.zeros((2, 4, 4)))
    with pytest.raises(ShapeError):
        PlanarImage(np.full((3, 4, 4), np.nan))
    with pytest.raises(ColorspaceError):
        PlanarImage(np.zeros((3, 4, 4)), "HSV")


def test_decode_black_png():
    img = gray_image(4, 4, 0.0)
    decoded = decode_image(encode_image(img, "png"))
    assert decoded.width == decoded.height == 4
    assert (decoded.planes == 0).all()


def test_decode_ppm_p3_primary_colors():
    data = b"P3\n2 1\n255\n255 0 0 0 255 0\n"
    img = decode_image(data)
    np.testing.assert_array_equal(img.planes[0], [[255.0, 0.0]])
    np.testing.assert_array_equal(img.planes[1], [[0.0, 255.0]])
    np.testing.assert_array_equal(img.planes[2], [[0.0, 0.0]])


def test_truncated_png_rejected():
    img = gray_image(16, 16)
    data = encode_image(img, "png")
    with pytest.raises(DecodeError):
        decode_image(data[: len(data) // 2])


def test_truncated_ppm_reports_offset():
    data = b"P6\n4 4\n255\n" + b"\x00" * 10
    with pytest.raises(DecodeError) as err:
        decode_image(data)
    assert err.value.offset is not None


def test_not_an_image():
    with pytest.raises(DecodeError):
        decode_image(b"GIF89a....")


def test_png_alpha_unsupported():
    import io

    from PIL import Image

    buf = io.BytesIO()
    Image.new("RGBA", (4, 4)).save(buf, format="PNG")
    with pytest.raises(UnsupportedFormatError):
        decode_image(buf.getvalue())


def test_png_16bit_unsupported():
    import io

    from PIL import Image

    buf = io.BytesIO()
    Image.new("I;16", (4, 4)).save(buf, format="PNG")
    with pytest.raises(UnsupportedFormatError):
        decode_image(buf.getvalue())


@pytest.mark.parametrize("fmt", ["png", "ppm"])
def test_round_trip_exact(fmt, rng):
    img = PlanarImage(rng.integers(0, 256, (3, 21, 17)).astype(float), "RGB")
    decoded = decode_image(encode_image(img, fmt))
    np.testing.assert_array_equal(decoded.planes, img.planes)


def test_encode_clamps_and_rounds():
    img = PlanarImage(np.full((3, 1, 2), 255.7), "RGB")
    img.planes[0, 0, 0] = -3.0
    decoded = decode_image(encode_image(img, "ppm"))
    assert decoded.planes[0, 0, 0] == 0.0
    assert decoded.planes[0, 0, 1] == 255.0


def test_encode_requires_rgb():
    with pytest.raises(ColorspaceError):
        encode_image(gray_image(4, 4, colorspace="YUV"), "png")


def test_gray_converts_to_neutral_yuv():
    yuv = rgb_to_yuv(gray_image(5, 5, 128.0))
    np.testing.assert_allclose(yuv.planes[0], 128.0, atol=1e-9)
    np.testing.assert_allclose(yuv.planes[1], 128.0, atol=1e-9)
    np.testing.assert_allclose(yuv.planes[2], 128.0, atol=1e-9)


def test_black_converts_to_neutral_chroma():
    yuv = rgb_to_yuv(gray_image(3, 3, 0.0))
    np.testing.assert_allclose(yuv.planes[0], 0.0, atol=1e-9)
    np.testing.assert_allclose(yuv.planes[1], 128.0, atol=1e-9)
    np.testing.assert_allclose(yuv.planes[2], 128.0, atol=1e-9)


def test_neutral_chroma_yuv_to_gray():
    yuv = gray_image(4, 4, colorspace="YUV")
    yuv.planes[0] = 200.0
    rgb = yuv_to_rgb(yuv)
    np.testing.assert_allclose(rgb.planes, 200.0, atol=1.0)


def test_out_of_gamut_luma_clamped():
    yuv = gray_image(2, 2, colorspace="YUV")
    yuv.planes[0] = 300.0
    rgb = yuv_to_rgb(yuv)
    assert (rgb.planes <= 255.0).all()
    np.testing.assert_allclose(rgb.planes[0], 255.0)


def test_colorspace_guards():
    with pytest.raises(ColorspaceError):
        rgb_to_yuv(gray_image(4, 4, colorspace="YUV"))
    with pytest.raises(ColorspaceError):
        yuv_to_rgb(gray_image(4, 4, colorspace="RGB"))


def test_round_trip_fixture(small_fixture):
    back = yuv_to_rgb(rgb_to_yuv(small_fixture))
    assert np.abs(back.planes - small_fixture.planes).max() <= 1.0


def test_round_trip_exhaustive_8bit():
    # float composition over every RGB triple; also bound the error when
    # the intermediate YUV is quantized to 8 bits (measured worst 1.384)
    g, b = np.meshgrid(np.arange(256.0), np.arange(256.0), indexing="ij")
    g = g.ravel()
    b = b.ravel()
    max_float = 0.0
    max_quant = 0.0
    for r in range(0, 256, 8):
        block = [np.full_like(g, float(rr)) for rr in range(r, r + 8)]
        rgb = np.stack([
            np.concatenate(block),
            np.tile(g, 8),
            np.tile(b, 8),
        ]).reshape(3, 8 * 256, 256)
        img = PlanarImage(rgb, "RGB")
        yuv = rgb_to_yuv(img)
        max_float = max(max_float, float(np.abs(yuv_to_rgb(yuv).planes - rgb).max()))
        yuv_q = PlanarImage(quantize_planes(yuv.planes), "YUV")
        max_quant = max(max_quant, float(np.abs(yuv_to_rgb(yuv_q).planes - rgb).max()))
    assert max_float <= 1.0
    assert max_quant <= 1.5


def test_psnr_identical_is_inf(small_fixture):
    assert psnr(small_fixture, small_fixture) == math.inf


def test_psnr_full_scale_is_zero():
    a = gray_image(1, 1, 0.0)
    b = gray_image(1, 1, 255.0)
    assert psnr(a, b) == pytest.approx(0.0, abs=1e-12)


def test_psnr_single_plane_unit_difference():
    a = gray_image(8, 8, 100.0)
    b = a.copy()
    b.planes[1] += 1.0
    # MSE = 1/3 over three planes
    assert psnr(a, b) == pytest.approx(10 * math.log10(3 * 255 ** 2), abs=1e-9)
    assert psnr(a, b) == pytest.approx(52.9, abs=0.01)


def test_psnr_symmetric(small_fixture, rng):
    noisy = PlanarImage(
        small_fixture.planes + rng.normal(0, 2, small_fixture.planes.shape), "RGB"
    )
    assert psnr(small_fixture, noisy) == pytest.approx(psnr(noisy, small_fixture))


def test_psnr_shape_mismatch():
    with pytest.raises(ShapeError):
        psnr(gray_image(4, 4), gray_image(5, 4))
    with pytest.raises(ShapeError):
        psnr(gray_image(4, 4), gray_image(4, 4, colorspace="YUV"))
