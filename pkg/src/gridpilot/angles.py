"""Detection angles from sinogram variance peaks and their orientation.

The pilot's line families concentrate the Radon coefficients at two
angles. Those show as peaks in the per-angle variance; zero crossings of
the variance derivative locate them. The -1-valued vertical lines leave
negative peaks in the normalized sinogram and the +1-valued horizontal
lines positive ones, which tells the two angles apart.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DetectionFailureError
from .radon import Sinogram


@dataclass
class VarianceProfile:
    """Per-angle variance of the projection profile and its derivative.

    The stored derivative uses central differences at interior points and
    one-sided differences at the ends.
    """

    angles: np.ndarray
    variance: np.ndarray
    derivative: np.ndarray


@dataclass
class AnglePair:
    """Classified detection angles plus a diagnostic confidence ratio."""

    phi_v: float  # angle of the transformed vertical-line family
    phi_h: float  # angle of the transformed horizontal-line family
    confidence: float = float("nan")


def variance_profile(s: Sinogram) -> VarianceProfile:
    """Variance of each angle column over its valid support offsets."""
    n = len(s.angles)
    var = np.empty(n)
    for k in range(n):
        var[k] = s.coeffs[s.support[:, k], k].var()
    deriv = np.empty(n)
    if n >= 3:
        deriv[1:-1] = (var[2:] - var[:-2]) / 2.0
        deriv[0] = var[1] - var[0]
        deriv[-1] = var[-1] - var[-2]
    else:
        deriv[:] = 0.0
    return VarianceProfile(np.asarray(s.angles, dtype=float), var, deriv)


def _circular_separation(a: float, b: float) -> float:
    d = abs(a - b) % 180.0
    return min(d, 180.0 - d)


def find_peak_angles(profile: VarianceProfile,
                     min_separation: float = 2.0) -> tuple[float, float]:
    """The two peak angles of the variance profile, smallest first.

    A candidate angle i satisfies dV[i-1] * dV[i+1] < 0 with a rising-then
    -falling orientation, indices taken circularly because the variance is
    180-degree periodic. Among candidates the two largest-variance angles
    at least min_separation degrees apart (circularly) are returned, which
    avoids picking two shoulders of one noisy ridge while still resolving
    genuinely close line families.
    """
    v = profile.variance
    n = len(v)
    if n < 3:
        raise DetectionFailureError("variance profile too short", stage="angles")
    # circular central differences for the crossing test
    dv = (np.roll(v, -1) - np.roll(v, 1)) / 2.0
    prev = np.roll(dv, 1)
    nxt = np.roll(dv, -1)
    cand = np.nonzero((prev * nxt < 0) & (prev > 0) & (nxt < 0))[0]
    if len(cand) < 2:
        raise DetectionFailureError(
            "pilot not found: fewer than two variance peaks", stage="angles"
        )
    order = cand[np.argsort(-v[cand], kind="stable")]
    selected: list[int] = []
    for i in order:
        if all(
            _circular_separation(profile.angles[i], profile.angles[j]) >= min_separation
            for j in selected
        ):
            selected.append(int(i))
        if len(selected) == 2:
            break
    if len(selected) < 2:
        raise DetectionFailureError(
            "pilot not found: variance peaks are not separable", stage="angles"
        )
    phi = sorted(float(profile.angles[i]) for i in selected)
    return phi[0], phi[1]


def classify_direction(s_denoised: Sinogram, phi1: float, phi2: float,
                       profile: VarianceProfile | None = None) -> AnglePair:
    """Decide which detection angle belongs to the vertical-line family.

    Compares the negative and positive peak mass (sum of magnitudes per
    sign) of each angle's denoised column; the column whose peaks are
    predominantly negative is the vertical family (its lines carry -1).
    Magnitude weighting rather than a bare entry count keeps the decision
    with the strong periodic line peaks instead of scattered residual
    noise. Order of the two inputs does not matter.
    """
    excess = {}
    total = 0.0
    for phi in (phi1, phi2):
        col = s_denoised.column(phi)
        neg = float(-col[col < 0].sum())
        pos = float(col[col > 0].sum())
        excess[phi] = neg - pos
        total += neg + pos
    if total == 0.0:
        raise DetectionFailureError(
            "pilot not found: denoised columns are empty", stage="classify"
        )
    if excess[phi1] == excess[phi2]:
        raise DetectionFailureError(
            "cannot orient grid: equal signed peak mass", stage="classify"
        )
    if excess[phi1] > excess[phi2]:
        phi_v, phi_h = phi1, phi2
    else:
        phi_v, phi_h = phi2, phi1
    confidence = float("nan")
    if profile is not None:
        med = float(np.median(profile.variance))
        if med > 0:
            iv = int(np.argmin(np.abs(profile.angles - phi_v)))
            ih = int(np.argmin(np.abs(profile.angles - phi_h)))
            confidence = float(max(profile.variance[iv], profile.variance[ih]) / med)
    return AnglePair(phi_v=float(phi_v), phi_h=float(phi_h), confidence=confidence)


def profile_to_csv(profile: VarianceProfile) -> str:
    """Debug dump: angle,variance,derivative rows."""
    lines = ["angle,variance,derivative"]
    for a, v, d in zip(profile.angles, profile.variance, profile.derivative):
        lines.append(f"{a},{v!r},{d!r}")
    return "\n".join(lines) + "\n"
