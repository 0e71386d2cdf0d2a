import numpy as np
import pytest

from gridpilot.errors import ConfigError
from gridpilot.imagery import PlanarImage
from gridpilot.pilot import (
    UNSET,
    PilotConfig,
    TernaryField,
    build_mask,
    embed_pilot,
    extract_ternary_field,
    mask_to_text,
)
from gridpilot.qim import QimParams

from conftest import gray_image


def test_config_validation():
    with pytest.raises(ConfigError):
        PilotConfig(gamma=101)  # odd
    with pytest.raises(ConfigError):
        PilotConfig(gamma=10, line_width=5)  # lines would merge
    with pytest.raises(ConfigError):
        PilotConfig(plane="V")


@pytest.fixture(scope="module")
def mask200():
    return build_mask(200, 200, PilotConfig(gamma=100))


def test_layout_vertical_negative_line(mask200):
    assert mask200.values[30, 0] == -1


def test_layout_horizontal_zero_line(mask200):
    # y = gamma/2 carries the zero-valued horizontal family
    assert mask200.values[50, 30] == 0


def test_layout_intersection_cycles(mask200):
    assert mask200.values[0, 0] == (0 + 0) % 3 - 1 == -1
    assert mask200.values[0, 1] == 0
    assert mask200.values[1, 1] == 1


def test_layout_line_width(mask200):
    # width 5 centered at 0: columns 0..2 and 198..199 (wrap) are set
    row = mask200.values[30]
    assert (row[:3] == -1).all()
    assert (row[198:] == -1).all()
    assert row[3] == UNSET
    assert (row[48:53] == 0).all()


def test_mask_periodic(mask200):
    cfg = PilotConfig(gamma=100)
    big = build_mask(400, 400, cfg)
    np.testing.assert_array_equal(big.values[:200, :200], big.values[200:, :200])
    np.testing.assert_array_equal(big.values[:200, :200], big.values[:200, 200:])


def test_small_image_warns():
    with pytest.warns(UserWarning):
        build_mask(150, 150, PilotConfig(gamma=100))


def test_set_fraction_converges():
    cfg = PilotConfig(gamma=100, line_width=5)
    mask = build_mask(2000, 2000, cfg)
    w, g = cfg.line_width, cfg.gamma
    expected = 4 * w / g - (2 * w / g) ** 2
    measured = mask.set_mask.mean()
    assert abs(measured - expected) / expected < 0.01


def test_embed_gray_image():
    img = gray_image(200, 200, colorspace="YUV")
    cfg = PilotConfig(gamma=100)
    stego = embed_pilot(img, cfg)
    # -1 lines snap 128 to 126; Y and V untouched
    assert stego.planes[1][30, 0] == 126.0
    np.testing.assert_array_equal(stego.planes[0], img.planes[0])
    np.testing.assert_array_equal(stego.planes[2], img.planes[2])


def test_embed_leaves_unset_pixels():
    img = gray_image(200, 200, colorspace="YUV")
    cfg = PilotConfig(gamma=100)
    stego = embed_pilot(img, cfg)
    mask = build_mask(200, 200, cfg)
    free = ~mask.set_mask
    np.testing.assert_array_equal(stego.planes[1][free], img.planes[1][free])


def test_embed_extract_round_trip(rng):
    cfg = PilotConfig(gamma=50)
    u = rng.uniform(20.0, 235.0, (200, 200))
    img = PlanarImage(np.stack([u, u, u]), "YUV")
    stego = embed_pilot(img, cfg)
    field = extract_ternary_field(stego, cfg.qim)
    mask = build_mask(200, 200, cfg)
    sel = mask.set_mask
    np.testing.assert_array_equal(field.values[sel], mask.values[sel])


def test_extract_gray_is_constant_zero():
    field = extract_ternary_field(gray_image(64, 64, 128.0, "YUV"))
    assert (field.values == 0).all()


def test_extract_dimensions(small_stego):
    from gridpilot.imagery import rgb_to_yuv

    field = extract_ternary_field(rgb_to_yuv(small_stego))
    assert field.values.shape == (small_stego.height, small_stego.width)
    assert np.isin(field.values, (-1, 0, 1)).all()


def test_mask_text_dump():
    text = mask_to_text(build_mask(8, 4, PilotConfig(gamma=4, line_width=1)))
    lines = text.strip().split("\n")
    assert len(lines) == 4
    assert set("".join(lines)) <= set(".n0p")
