"""Grid interval and phase estimation from periodic sinogram peaks.

The raw ternary field is remapped into a vertical and a horizontal
component so that each component carries alternating +-1 lines of one
family while the other family and most cover-image content become
neutral. The projection profile of a component at its detection angle is
then periodic; its autocorrelation spectrum has peaks at odd multiples of
the base frequency 1/gamma.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DetectionFailureError
from .pilot import TernaryField
from .radon import normalize_sinogram, radon_columns, threshold_denoise

_VERTICAL_REMAP = {-1: -1.0, 0: 1.0, 1: 0.0}
_HORIZONTAL_REMAP = {-1: 0.0, 0: -1.0, 1: 1.0}

#: largest harmonic index considered when matching spectral peaks
MAX_HARMONIC = 9


@dataclass
class ComponentField:
    """Standardized single-family view of an extracted ternary field."""

    values: np.ndarray
    direction: str  # "vertical" | "horizontal"


@dataclass
class IntervalEstimate:
    gamma_px: float                 # detected line spacing in pixels
    base_frequency: float           # cycles/pixel, gamma_px = 1/base_frequency
    harmonics_used: list = field(default_factory=list)  # (frequency, odd index)
    phase_px: float = float("nan")  # anchor line offset modulo gamma_px


def split_fields(field_: TernaryField,
                 ignore: np.ndarray | None = None) -> tuple[ComponentField, ComponentField]:
    """Remap the ternary field into its two line-family components.

    vertical:   {-1 -> -1, 0 -> +1, +1 -> 0}
    horizontal: {-1 -> 0, 0 -> -1, +1 -> +1}

    Each component is standardized to zero mean and unit variance. Pixels
    in ``ignore`` (out-of-content margins detected by the caller) are held
    at zero so they contribute nothing to the projections.
    """
    sym = field_.values
    out = []
    for remap, direction in ((_VERTICAL_REMAP, "vertical"),
                             (_HORIZONTAL_REMAP, "horizontal")):
        arr = np.zeros(sym.shape, dtype=np.float64)
        for s, v in remap.items():
            if v != 0.0:
                arr[sym == s] = v
        if ignore is None:
            mu, sd = arr.mean(), arr.std()
            if sd <= 1e-12:
                raise DetectionFailureError("constant ternary field", stage="split")
            arr = (arr - mu) / sd
        else:
            keep = ~ignore
            vals = arr[keep]
            if vals.size == 0:
                raise DetectionFailureError("no content pixels", stage="split")
            mu, sd = vals.mean(), vals.std()
            if sd <= 1e-12:
                raise DetectionFailureError("constant ternary field", stage="split")
            z = np.zeros_like(arr)
            z[keep] = (vals - mu) / sd
            arr = z
        out.append(ComponentField(arr, direction))
    return out[0], out[1]


def match_odd_harmonic(f: float, f0: float) -> int | None:
    """The odd n <= MAX_HARMONIC with 0.9*n*f0 <= f <= 1.1*n*f0, or None."""
    if f0 <= 0:
        return None
    n = round(f / f0)
    if 1 <= n <= MAX_HARMONIC and n % 2 == 1 and 0.9 * n * f0 <= f <= 1.1 * n * f0:
        return int(n)
    return None


def estimate_base_frequency(column: np.ndarray, noise_floor_factor: float = 4.0,
                            min_periods: int = 3,
                            relative_floor: float = 0.02,
                            f_bounds: tuple[float, float] | None = None) -> IntervalEstimate:
    """Base frequency of a denoised projection column.

    Autocorrelation (biased, positive lags) of the column, Hann-tapered to
    suppress leakage sidelobes, is Fourier transformed with 8x zero padding.
    Local maxima of the power spectrum above the noise floor are candidate
    peaks, refined to sub-bin accuracy by fitting a parabola through the
    three samples around each maximum. The provisional base frequency is
    the lowest candidate whose odd-multiple band (index capped at
    MAX_HARMONIC) contains the strongest peak; the final estimate is the
    power-weighted mean of f/n over all peaks matching an odd harmonic
    index n.

    f_bounds optionally restricts the fundamental search range; detectors
    pass the range of line spacings that plausible attack strengths can
    produce so broad content structure cannot masquerade as the grid.
    """
    col = np.asarray(column, dtype=np.float64)
    n = len(col)
    if n < 8 or not np.any(col):
        raise DetectionFailureError("empty projection column", stage="interval")
    spec_in = np.fft.rfft(col, 2 * n)
    autocorr = np.fft.irfft(spec_in * np.conj(spec_in), 2 * n)[:n] / n
    taper = 0.5 * (1.0 + np.cos(np.pi * np.arange(n) / n))
    pad = 8 * n
    power = np.abs(np.fft.rfft(autocorr * taper, pad)) ** 2
    freqs = np.fft.rfftfreq(pad, d=1.0)
    df = freqs[1]
    f_min = min_periods / n
    usable = power[freqs >= f_min]
    if usable.size == 0:
        raise DetectionFailureError("column too short", stage="interval")
    floor = max(noise_floor_factor * float(np.median(power[1:])),
                relative_floor * float(usable.max()))
    rising = power[1:-1] > power[:-2]
    falling = power[1:-1] >= power[2:]
    idx = np.nonzero(rising & falling & (power[1:-1] > floor)
                     & (freqs[1:-1] >= f_min))[0] + 1
    peaks = []
    for i in idx:
        a, b, c = power[i - 1], power[i], power[i + 1]
        den = a - 2 * b + c
        shift = 0.5 * (a - c) / den if den != 0 else 0.0
        peaks.append((float(freqs[i] + shift * df), float(b)))
    if not peaks:
        raise DetectionFailureError("no spectral peak above noise floor",
                                    stage="interval")
    peaks.sort()
    lo, hi = f_bounds if f_bounds is not None else (0.0, float("inf"))
    candidates = [(f, p) for f, p in peaks if lo <= f <= hi]
    if not candidates:
        raise DetectionFailureError("no spectral peak in the expected band",
                                    stage="interval")
    f_strongest = max(candidates, key=lambda t: t[1])[0]
    f0 = None
    for f, _ in candidates:
        if match_odd_harmonic(f_strongest, f) is not None:
            f0 = f
            break
    if f0 is None:
        raise DetectionFailureError("no odd-harmonic structure in spectrum",
                                    stage="interval")
    accepted = []
    weight_sum = 0.0
    estimate = 0.0
    for f, p in peaks:
        nh = match_odd_harmonic(f, f0)
        if nh is not None:
            accepted.append((f, nh))
            weight_sum += p
            estimate += p * f / nh
    f0_hat = estimate / weight_sum
    return IntervalEstimate(gamma_px=1.0 / f0_hat, base_frequency=f0_hat,
                            harmonics_used=accepted)


def _fold_phase(values: np.ndarray, coords: np.ndarray, gamma: float) -> float:
    """Circular-mean location of the weighted peaks modulo gamma.

    Sub-pixel refinement of the strongest-peak offset: every peak sample
    votes with its weight at its coordinate folded by the period.
    """
    theta = 2.0 * np.pi * coords / gamma
    vec = np.sum(values * np.exp(1j * theta))
    if vec == 0:
        return float("nan")
    return float((gamma * np.angle(vec) / (2.0 * np.pi)) % gamma)


def estimate_interval(component: ComponentField, phi_deg: float,
                      tau: float = 1.5, full_transform: bool = False,
                      angle_step: float = 0.5,
                      f_bounds: tuple[float, float] | None = None) -> IntervalEstimate:
    """Line spacing and phase of one component at its detection angle.

    Only the needed sinogram column is computed unless ``full_transform``
    is set, in which case the entire transform is taken and the column
    sliced out (same values, more work).

    The returned phase is referenced to the image origin (pixel 0,0): the
    position of the anchor line family modulo gamma, where anchor lines
    are the -1 lines for the vertical component and the +1 lines for the
    horizontal component (both sit at coordinate 0 mod gamma at embed
    time).
    """
    if full_transform:
        from .radon import radon_transform

        sino = radon_transform(component.values, angle_step)
    else:
        sino = radon_columns(component.values, np.array([phi_deg]))
    sino = threshold_denoise(normalize_sinogram(sino), tau)
    k = sino.angle_index(phi_deg)
    m = sino.support[:, k]
    column = sino.coeffs[m, k]
    est = estimate_base_frequency(column, f_bounds=f_bounds)

    h, w = component.values.shape
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    offsets = sino.offsets[m]
    rad = np.deg2rad(phi_deg)
    # projection coordinate of the image origin (pixel 0,0)
    rho_origin = -cx * np.cos(rad) + cy * np.sin(rad)
    if component.direction == "vertical":
        # anchor lines decode negative; orient along increasing image x
        weights = np.maximum(0.0, -column)
        coords = offsets - rho_origin
    else:
        # anchor lines decode positive; orient along increasing image row
        weights = np.maximum(0.0, column)
        coords = rho_origin - offsets
    est.phase_px = _fold_phase(weights, coords, est.gamma_px)
    return est


def spectrum_to_csv(column: np.ndarray) -> str:
    """Debug dump of the autocorrelation power spectrum of a column."""
    col = np.asarray(column, dtype=np.float64)
    n = len(col)
    spec_in = np.fft.rfft(col, 2 * n)
    autocorr = np.fft.irfft(spec_in * np.conj(spec_in), 2 * n)[:n] / n
    taper = 0.5 * (1.0 + np.cos(np.pi * np.arange(n) / n))
    power = np.abs(np.fft.rfft(autocorr * taper, 8 * n)) ** 2
    freqs = np.fft.rfftfreq(8 * n, d=1.0)
    lines = ["frequency,power"]
    for f, p in zip(freqs, power):
        lines.append(f"{f!r},{p!r}")
    return "\n".join(lines) + "\n"
