"""Data behind the ratio-vs-time and tau-vs-tau_CSL figures."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .config import RunConfig, parse_rate, run_trajectory
from .dynamics import format_float
from .qsl import tau_csl

FIGURES = ("fig2_left", "fig2_right", "fig3_left", "fig3_right")
THETAS = (math.pi / 2, math.pi / 3, math.pi / 4)
OHMIC = "ohmic:k=4,wc=1"


@dataclass(frozen=True)
class FigureSpec:
    figure: str
    taus: np.ndarray

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise ValueError(f"figure must be one of {FIGURES}, got {self.figure!r}")
        taus = np.asarray(self.taus, dtype=float)
        if taus.size < 16 or np.any(np.diff(taus) <= 0):
            raise ValueError("sweep grid must be strictly increasing with >= 16 points")


def default_spec(figure: str, points: int = 64) -> FigureSpec:
    if figure.startswith("fig2"):
        taus = np.geomspace(0.05, 2.0, points)
    else:
        taus = np.linspace(0.05, 1.5, points)
    return FigureSpec(figure, taus)


def figure_rows(spec: FigureSpec) -> tuple[list[str], list[tuple]]:
    """Header and rows (sorted by sweep key) for one figure."""
    if spec.figure.startswith("fig2"):
        t0 = 1.0 if spec.figure == "fig2_right" else 0.0
        rate = parse_rate(OHMIC)
        rows = []
        for tau in spec.taus:
            cfg = RunConfig(channel="dephasing", gamma=OHMIC, theta=math.pi / 2,
                            omega0=0.0, tau=float(tau), t0=t0)
            rep = tau_csl(run_trajectory(cfg))
            rows.append((float(tau), rep.ratio, float(rate.at(t0 + tau))))
        return ["tau", "ratio", "gamma_at_tau"], sorted(rows)

    channel = "dephasing" if spec.figure == "fig3_left" else "damping"
    rows = []
    for theta in THETAS:
        for tau in spec.taus:
            cfg = RunConfig(channel=channel, gamma="const:2", theta=theta,
                            omega0=0.0, tau=float(tau))
            rows.append((theta, float(tau), tau_csl(run_trajectory(cfg)).tau_csl))
    return ["theta", "tau", "tau_csl"], sorted(rows)


def rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_float(x) for x in row])
    return buf.getvalue()
