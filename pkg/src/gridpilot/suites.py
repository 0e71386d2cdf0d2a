"""Built-in attack parameter tables used by the evaluate command.

The single-attack sweeps vary one parameter at a time; the composite
table applies three transforms in sequence (listed first to last). All
entries produce AttackSpec values without a crop; the runner attaches the
crop appropriate for the fixture resolution.
"""

from __future__ import annotations

from .attacks import AttackSpec, rotation, scaling, shear_x, shear_y

SCALING_SWEEP = [round(0.1 * k, 1) for k in range(1, 21)]        # S_y, S_x = 1.0
ROTATION_SWEEP = list(range(0, 95, 5))                           # degrees
SHEAR_SWEEP = list(range(0, 85, 5))                              # theta_y, theta_x = 0

#: Twelve three-step composite patterns, keyed by pattern number.
COMPOSITE_PATTERNS = {
    1: [shear_y(50), scaling(0.6, 1.1), shear_x(65)],
    2: [rotation(30), shear_x(30), shear_y(65)],
    3: [shear_y(40), scaling(1.5, 1.3), shear_x(25)],
    4: [shear_x(60), scaling(1.3, 0.5), shear_y(70)],
    5: [scaling(0.8, 1.4), rotation(250), shear_y(15)],
    6: [shear_y(20), shear_x(55), rotation(355)],
    7: [shear_y(70), rotation(195), scaling(1.2, 1.5)],
    8: [scaling(1.9, 1.5), shear_x(45), shear_y(55)],
    9: [scaling(0.7, 1.1), rotation(215), shear_x(60)],
    10: [shear_y(30), shear_x(65), rotation(105)],
    11: [scaling(0.9, 0.5), rotation(245), shear_x(20)],
    12: [scaling(0.6, 1.1), shear_y(60), shear_y(0)],
}

#: Two-step patterns for the watermark synchronization evaluation.
WATERMARK_PATTERNS = {
    1: [shear_y(5), rotation(10)],
    2: [scaling(1.0, 1.1), rotation(10)],
    3: [rotation(5), scaling(1.0, 1.2)],
    4: [shear_x(10), shear_y(5)],
}


def single_attack_suite() -> list[tuple[str, AttackSpec]]:
    """Label/spec pairs for the scaling, rotation and shear sweeps."""
    out = []
    for sy in SCALING_SWEEP:
        out.append((f"scale_sy={sy}", AttackSpec(steps=[scaling(1.0, sy)])))
    for deg in ROTATION_SWEEP:
        out.append((f"rotate={deg}", AttackSpec(steps=[rotation(deg)])))
    for deg in SHEAR_SWEEP:
        out.append((f"shear_y={deg}", AttackSpec(steps=[shear_y(deg)])))
    return out


def composite_attack_suite() -> list[tuple[str, AttackSpec]]:
    return [
        (f"composite_{k}", AttackSpec(steps=list(steps)))
        for k, steps in sorted(COMPOSITE_PATTERNS.items())
    ]


def watermark_attack_suite() -> list[tuple[str, AttackSpec]]:
    return [
        (f"wm_composite_{k}", AttackSpec(steps=list(steps)))
        for k, steps in sorted(WATERMARK_PATTERNS.items())
    ]
