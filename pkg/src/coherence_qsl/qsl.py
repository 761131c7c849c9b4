"""Coherence speed-limit time, geodesics and saturation diagnostics."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .coherence import addressed_angle, closest_incoherent, coherence_stack
from .densmat import (
    DensityMatrix,
    _frozen,
    angle,
    as_density,
    hermitize,
    sqrt_psd,
)
from .dynamics import Trajectory
from .errors import GridTooCoarse, ZeroSpeed
from .metric import midpoint_speeds

MIN_NODES = 8
ZERO_SPEED = 1e-14
ZERO_DELTA = 1e-14


@dataclass(frozen=True)
class QslReport:
    delta_c: float
    path_length: float
    avg_speed: float
    tau: float
    tau_csl: float
    ratio: float
    vacuous: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def path_length(traj: Trajectory) -> float:
    """Integral of the speed with the composite midpoint rule.

    Speeds are taken at panel midpoints, so the integrable t^(-1/2) blow-up
    at a pure initial state is never evaluated.
    """
    return float(np.sum(midpoint_speeds(traj)) * traj.dt)


def tau_csl(traj: Trajectory) -> QslReport:
    """Coherence speed-limit time |Delta_C| / <speed> for one trajectory."""
    if traj.n_nodes < MIN_NODES:
        raise GridTooCoarse(f"need at least {MIN_NODES} nodes, got {traj.n_nodes}")
    c = coherence_stack(traj.sqrts[[0, -1]])
    ang = addressed_angle(c)
    dc = float(ang[1] - ang[0])
    length = path_length(traj)
    tau = traj.tau
    avg = length / tau
    if avg < ZERO_SPEED:
        if abs(dc) > ZERO_DELTA:
            raise ZeroSpeed(
                f"coherence changed by {dc:.3e} along a trajectory with zero speed"
            )
        return QslReport(dc, length, avg, tau, 0.0, 0.0, vacuous=True)
    if abs(dc) <= ZERO_DELTA:
        return QslReport(dc, length, avg, tau, 0.0, 0.0, vacuous=True)
    t_csl = abs(dc) / avg
    return QslReport(dc, length, avg, tau, t_csl, t_csl / tau)


def dephasing_arc_length(abs_rho01_0: float, abs_rho01_tau: float) -> float:
    """Length |arcsin 2x_tau - arcsin 2x_0| / 2 of equal-population dephasing."""
    for x in (abs_rho01_0, abs_rho01_tau):
        if not 0.0 <= x <= 0.5:
            raise ValueError(f"|rho01| = {x} must lie in [0, 1/2]")
    return abs(0.5 * (np.arcsin(2.0 * abs_rho01_tau) - np.arcsin(2.0 * abs_rho01_0)))


def _linear(t: float, tau: float) -> float:
    return t / tau


@dataclass(frozen=True, eq=False)
class GeodesicPath:
    """Wigner-Yanase geodesic between two states.

    ``schedule(t, tau)`` maps [0, tau] monotonically onto [0, 1].
    """

    rho0: DensityMatrix
    rho_tau: DensityMatrix
    tau: float = 1.0
    schedule: Callable[[float, float], float] = field(default=_linear)

    def __post_init__(self):
        object.__setattr__(self, "rho0", as_density(self.rho0))
        object.__setattr__(self, "rho_tau", as_density(self.rho_tau))

    def p(self, t: float) -> float:
        if t <= 0:
            return 0.0
        if t >= self.tau:
            return 1.0
        return float(self.schedule(t, self.tau))

    def at_time(self, t: float) -> DensityMatrix:
        return geodesic_point(self, self.p(t))


def _geodesic_root(path: GeodesicPath, p: float) -> np.ndarray:
    r0 = sqrt_psd(path.rho0).sqrt
    r1 = sqrt_psd(path.rho_tau).sqrt
    mix = (1.0 - p) * r0 + p * r1
    return mix / np.linalg.norm(mix)


def geodesic_point(path: GeodesicPath, p: float) -> DensityMatrix:
    """State whose root is ((1-p) sqrt(rho0) + p sqrt(rho_tau)) / norm."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p == 0.0 or np.array_equal(path.rho0.mat, path.rho_tau.mat):
        return path.rho0
    if p == 1.0:
        return path.rho_tau
    root = _geodesic_root(path, p)
    m = hermitize(root @ root)
    return DensityMatrix(_frozen(m / np.trace(m).real))


def geodesic_trajectory(path: GeodesicPath, steps: int) -> Trajectory:
    t = np.linspace(0.0, path.tau, steps + 1)
    states = np.array([path.at_time(ti).mat for ti in t])
    return Trajectory.from_states(t, states)


def geodesic_triangle_check(path: GeodesicPath, p: float) -> tuple[float, float]:
    """(angle(rho0, rho_tau), angle(rho0, rho_p) + angle(rho_p, rho_tau))."""
    mid = geodesic_point(path, p)
    total = angle(path.rho0, path.rho_tau)
    split = angle(path.rho0, mid) + angle(mid, path.rho_tau)
    return total, split


def geodesic_trace_profile(rho0, rho_tau, p: float) -> float:
    """Tr sqrt(rho_p) along the geodesic, from the state itself."""
    point = geodesic_point(GeodesicPath(rho0, rho_tau), p)
    return float(np.trace(sqrt_psd(point).sqrt).real)


def geodesic_trace_closed_form(rho0, rho_tau, p: float) -> float:
    """[(1-p) Tr sqrt(rho0) + p Tr sqrt(rho_tau)] / sqrt(1 - 2p(1-p)(1-A))."""
    s0, s1 = sqrt_psd(rho0).sqrt, sqrt_psd(rho_tau).sqrt
    aff = float(np.trace(s0 @ s1).real)
    num = (1.0 - p) * np.trace(s0).real + p * np.trace(s1).real
    return float(num / np.sqrt(1.0 - 2.0 * p * (1.0 - p) * (1.0 - aff)))


@dataclass(frozen=True)
class SaturationReport:
    equal_diag_sqrt: bool
    static_diag_sqrt: bool
    fixed_closest_incoherent: bool
    max_diag_spread: float
    max_diag_drift: float
    max_closest_drift: float


def saturation_check(traj: Trajectory, tol: float = 1e-9) -> SaturationReport:
    """Test the geodesic attainability conditions along a trajectory.

    - equal_diag_sqrt: <i|sqrt(rho_t)|i> identical for all i at every node;
    - static_diag_sqrt: diagonals of sqrt(rho_t) never move from t = 0;
    - fixed_closest_incoherent: the closest incoherent state never moves.
    """
    diag = np.einsum("nii->ni", traj.sqrts).real
    spread = float(np.max(diag.max(axis=1) - diag.min(axis=1)))
    drift = float(np.max(np.abs(diag - diag[0])))
    d2 = diag**2
    probs = d2 / d2.sum(axis=1, keepdims=True)
    p0 = closest_incoherent(traj.root(0)).probs
    closest = float(np.max(np.abs(probs - p0)))
    return SaturationReport(
        equal_diag_sqrt=spread <= tol,
        static_diag_sqrt=drift <= tol,
        fixed_closest_incoherent=closest <= tol,
        max_diag_spread=spread,
        max_diag_drift=drift,
        max_closest_drift=closest,
    )
