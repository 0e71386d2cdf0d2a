import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridpilot.errors import ConfigError, DomainError
from gridpilot.qim import QimParams, embed_symbol, extract_symbol


def test_embed_known_values():
    # hand-evaluated: floor(100/9 - (p+1)/3 + 0.5) recombined with the coset
    assert embed_symbol(100, 0) == 102.0
    assert embed_symbol(100, -1) == 99.0
    assert embed_symbol(100, 1) == 96.0


def test_extract_known_values():
    assert extract_symbol(102) == 0
    assert extract_symbol(99) == -1
    assert extract_symbol(96) == 1


def test_gray_samples():
    # 128 snaps to 126 for symbol -1 and reads back as symbol 0 untouched
    assert embed_symbol(128, -1) == 126.0
    assert extract_symbol(128) == 0


def test_bad_symbol_rejected():
    with pytest.raises(DomainError):
        embed_symbol(100, 2)
    with pytest.raises(DomainError):
        embed_symbol(100, np.array([0, 1, 5]))


def test_nonfinite_sample_rejected():
    with pytest.raises(DomainError):
        embed_symbol(float("nan"), 0)


def test_delta_must_be_positive():
    with pytest.raises(ConfigError):
        QimParams(delta=0)
    with pytest.raises(ConfigError):
        QimParams(delta=-3)


def test_round_trip_grid():
    params = QimParams()
    u = np.arange(params.delta, 255.0 - params.delta + 0.25, 0.25)
    for p in (-1, 0, 1):
        embedded = embed_symbol(u, np.full(u.shape, p, dtype=np.int8), params)
        assert (extract_symbol(embedded, params) == p).all()
        assert np.abs(embedded - u).max() <= params.delta


def test_idempotent():
    u = np.linspace(5.0, 250.0, 1001)
    for p in (-1, 0, 1):
        once = embed_symbol(u, np.full(u.shape, p, dtype=np.int8))
        twice = embed_symbol(once, np.full(u.shape, p, dtype=np.int8))
        np.testing.assert_array_equal(once, twice)


def test_vectorized_matches_scalar():
    u = np.array([0.0, 17.3, 100.0, 254.9])
    p = np.array([-1, 0, 1, 0], dtype=np.int8)
    vec = embed_symbol(u, p)
    for i in range(len(u)):
        assert vec[i] == embed_symbol(float(u[i]), int(p[i]))


@given(
    u=st.floats(min_value=9.0, max_value=246.0),
    p=st.sampled_from([-1, 0, 1]),
)
@settings(max_examples=300, deadline=None)
def test_round_trip_property(u, p):
    embedded = embed_symbol(u, p)
    assert extract_symbol(embedded) == p
    assert abs(embedded - u) <= 9.0


@given(
    u=st.floats(min_value=-1000.0, max_value=1000.0),
    delta=st.floats(min_value=0.5, max_value=50.0),
)
@settings(max_examples=200, deadline=None)
def test_extract_total_function(u, delta):
    assert extract_symbol(u, QimParams(delta=delta)) in (-1, 0, 1)
