"""Trial records, distribution summaries and report serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

CSV_COLUMNS = [
    "image", "attack", "sx", "sy", "theta_r", "theta_x", "theta_y",
    "crop_w", "crop_h", "err", "psnr", "ber", "excluded",
]


@dataclass
class TrialRecord:
    """One embed/attack/estimate run.

    Detection failures carry no matrix: err is None and excluded is True,
    so they drop out of the summary statistics (but stay in the raw rows).
    """

    image: str
    attack: str
    sx: float | None = None
    sy: float | None = None
    theta_r: float | None = None
    theta_x: float | None = None
    theta_y: float | None = None
    crop_w: int | None = None
    crop_h: int | None = None
    err: float | None = None
    psnr: float | None = None
    ber: float | None = None
    excluded: bool = False
    extra: dict = field(default_factory=dict)

    def row(self) -> list:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, float):
                return repr(v)
            return str(v)

        return [fmt(getattr(self, c)) for c in CSV_COLUMNS]


def summarize(trials: list[TrialRecord], group_by: str = "attack") -> dict:
    """Five-number summaries of the relative error per group.

    Quantiles use linear interpolation between order statistics. Excluded
    trials are counted but not summarized; an empty group yields an entry
    with n = 0 and no statistics.
    """
    groups: dict = {}
    for t in trials:
        groups.setdefault(getattr(t, group_by), []).append(t)
    out = {}
    for key in sorted(groups, key=str):
        members = groups[key]
        errs = np.array([t.err for t in members if not t.excluded and t.err is not None])
        n_excluded = sum(1 for t in members if t.excluded)
        entry: dict = {"n": int(errs.size), "n_excluded": n_excluded}
        if errs.size:
            q = np.quantile(errs, [0.0, 0.25, 0.5, 0.75, 1.0])
            entry.update(
                min=float(q[0]), q1=float(q[1]), median=float(q[2]),
                q3=float(q[3]), max=float(q[4]),
            )
        out[str(key)] = entry
    return out


def write_csv(trials: list[TrialRecord], fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for t in trials:
        writer.writerow(t.row())


def trials_to_csv(trials: list[TrialRecord]) -> str:
    buf = io.StringIO()
    write_csv(trials, buf)
    return buf.getvalue()


def report_json(trials: list[TrialRecord], group_by: str = "attack") -> str:
    """Nested JSON report: raw trials plus grouped summaries."""

    def clean(v):
        if isinstance(v, float) and math.isinf(v):
            return "inf"
        return v

    raw = []
    for t in trials:
        raw.append({c: clean(getattr(t, c)) for c in CSV_COLUMNS})
    return json.dumps(
        {"summary": summarize(trials, group_by), "trials": raw}, indent=2
    )
