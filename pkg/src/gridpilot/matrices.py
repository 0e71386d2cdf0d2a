"""Transformation matrix from detection angles and normalized intervals.

Matrices act on column vectors in mathematical coordinates (x right,
y up). The unit points A(1,0) and B(0,1) map to A' and B', whose
direction angles alpha and beta follow from the detection angles; the
normalized intervals fix their lengths. Because the pilot grid is point
symmetric the estimate is only determined up to sign, so every estimate
carries its 180-degree twin.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .angles import AnglePair
from .errors import DegenerateLatticeError, DomainError


@dataclass
class TransformEstimate:
    """Estimated 2x2 matrix, its 180-degree twin and detection diagnostics."""

    matrix: np.ndarray
    twin: np.ndarray
    alpha_deg: float
    beta_deg: float
    gamma_v: float  # detected vertical-family interval / embedded interval
    gamma_h: float
    confidence: float = float("nan")
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "matrix": self.matrix.tolist(),
            "twin": self.twin.tolist(),
            "alpha": self.alpha_deg,
            "beta": self.beta_deg,
            "gamma_v": self.gamma_v,
            "gamma_h": self.gamma_h,
            "confidence": self.confidence,
        }
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "TransformEstimate":
        d = json.loads(text)
        return cls(
            matrix=np.asarray(d["matrix"], dtype=float),
            twin=np.asarray(d["twin"], dtype=float),
            alpha_deg=float(d["alpha"]),
            beta_deg=float(d["beta"]),
            gamma_v=float(d["gamma_v"]),
            gamma_h=float(d["gamma_h"]),
            confidence=float(d.get("confidence", float("nan"))),
        )


def angles_to_directions(pair: AnglePair) -> tuple[float, float]:
    """Direction angles (alpha, beta) of A' and B' from the detection angles.

    A projection angle phi detects lines running at phi + 90 degrees, so
    the horizontal family's direction is phi_h + 90 and the vertical
    family's is phi_v + 90, each modulo 180. The representative pair is
    chosen with beta - alpha in (0, 180) so the estimated basis keeps
    positive orientation: geometric attacks built from scaling, rotation
    and shear never mirror the image. The overall sign ambiguity is the
    twin's job.
    """
    alpha = (pair.phi_h + 90.0) % 180.0
    beta = (pair.phi_v + 90.0) % 180.0
    if beta <= alpha:
        beta += 180.0
    return alpha, beta


def build_matrix(alpha_deg: float, beta_deg: float,
                 gamma_v: float, gamma_h: float) -> np.ndarray:
    """Assemble the estimated matrix from directions and intervals.

    T = [[gv*cos(a), gh*cos(b)], [gv*sin(a), gh*sin(b)]] / sin|b - a|

    where the intervals are already normalized by the embedded interval.
    """
    if not (gamma_v > 0 and gamma_h > 0):
        raise DomainError("normalized intervals must be positive")
    diff = abs(beta_deg - alpha_deg) % 180.0
    if min(diff, 180.0 - diff) < 1.0:
        raise DegenerateLatticeError(
            f"grid directions {alpha_deg:.2f} and {beta_deg:.2f} are within "
            "1 degree of parallel"
        )
    a = math.radians(alpha_deg)
    b = math.radians(beta_deg)
    s = abs(math.sin(b - a))
    return np.array([
        [gamma_v * math.cos(a) / s, gamma_h * math.cos(b) / s],
        [gamma_v * math.sin(a) / s, gamma_h * math.sin(b) / s],
    ])


def twin_matrix(t: np.ndarray) -> np.ndarray:
    """The 180-degree-rotated alternative: entrywise negation."""
    return -np.asarray(t, dtype=float)


def relative_error(estimate: np.ndarray, truth: np.ndarray) -> float:
    """Frobenius norm of the difference over the Frobenius norm of truth."""
    truth = np.asarray(truth, dtype=float)
    denom = float(np.linalg.norm(truth))
    if denom == 0.0:
        raise DomainError("reference matrix must be nonzero")
    return float(np.linalg.norm(np.asarray(estimate, dtype=float) - truth) / denom)


def select_best(estimate: TransformEstimate,
                truth: np.ndarray) -> tuple[np.ndarray, float]:
    """Pick the candidate (primary or twin) closer to the ground truth."""
    e_primary = relative_error(estimate.matrix, truth)
    e_twin = relative_error(estimate.twin, truth)
    if e_twin < e_primary:
        return estimate.twin, e_twin
    return estimate.matrix, e_primary
