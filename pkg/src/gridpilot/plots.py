"""Figure rendering for evaluation reports.

Reads trial rows (the same data as the CSV report) and writes PNG figures
next to it: box-and-whisker plots of relative error or BER per attack
parameter and a PSNR line for interval sweeps. Kept separate from the
metrics module so the library core has no plotting dependency at call
time; only the report path imports matplotlib.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .metrics import TrialRecord


def _grouped(trials: list[TrialRecord], value: str, group_by: str):
    groups: dict = {}
    for t in trials:
        if t.excluded:
            continue
        v = getattr(t, value)
        if v is None or (isinstance(v, float) and math.isinf(v)):
            continue
        groups.setdefault(getattr(t, group_by), []).append(v)
    keys = sorted(groups, key=lambda k: (isinstance(k, str), k))
    return keys, [groups[k] for k in keys]


def boxplot_by_group(trials: list[TrialRecord], out_path, value: str = "err",
                     group_by: str = "attack", title: str = "",
                     ylabel: str = "relative error") -> Path | None:
    """Box-and-whisker of one metric per attack group; returns the path."""
    keys, data = _grouped(trials, value, group_by)
    if not data:
        return None
    fig, ax = plt.subplots(figsize=(max(6.0, 0.6 * len(keys) + 2.0), 4.0))
    ax.boxplot(data, tick_labels=[str(k) for k in keys], whis=(0, 100),
               medianprops={"color": "tab:orange"})
    ax.set_xlabel(group_by)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, axis="y", alpha=0.3)
    plt.setp(ax.get_xticklabels(), rotation=45, ha="right")
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def psnr_line(trials: list[TrialRecord], out_path, group_by: str = "attack",
              title: str = "embedding quality") -> Path | None:
    """Mean PSNR per group as a line plot (for grid interval sweeps)."""
    keys, data = _grouped(trials, "psnr", group_by)
    if not data:
        return None
    means = [sum(v) / len(v) for v in data]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(range(len(keys)), means, marker="o")
    ax.set_xticks(range(len(keys)))
    ax.set_xticklabels([str(k) for k in keys], rotation=45, ha="right")
    ax.set_xlabel(group_by)
    ax.set_ylabel("PSNR (dB)")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_report_figures(trials: list[TrialRecord], out_dir,
                          prefix: str = "report") -> list[Path]:
    """Standard figure set for an evaluation report directory."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    p = boxplot_by_group(trials, out_dir / f"{prefix}_error.png",
                         value="err", title="matrix estimation error")
    if p:
        written.append(p)
    if any(t.ber is not None for t in trials):
        p = boxplot_by_group(trials, out_dir / f"{prefix}_ber.png",
                             value="ber", ylabel="bit error rate",
                             title="watermark BER")
        if p:
            written.append(p)
    p = psnr_line(trials, out_dir / f"{prefix}_psnr.png")
    if p:
        written.append(p)
    return written
