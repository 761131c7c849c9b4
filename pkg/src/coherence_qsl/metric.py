"""Wigner-Yanase speed along a trajectory and its Fisher/skew split.

All derivatives are second-order finite differences on the trajectory grid:
central at interior nodes, one-sided at the two endpoints.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .densmat import hermitize
from .dynamics import Trajectory, format_float
from .errors import EigenTrackingFailure, GridTooCoarse, SingularInput

PURE_EIG_TOL = 1e-10
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class SpeedSample:
    """Squared speed and its split; ``fisher`` is NaN near pure states.

    ``cross`` is the trace term that the split neglects; it should vanish.
    """

    t: float
    speed: float
    fisher: float
    skew: float
    recomposed: float
    cross: float = 0.0


def _stencil(traj: Trajectory, i: int):
    """Node index, stencil nodes and difference weights for d/dt at ``i``.

    The weights act on differences from the first stencil node, so a constant
    trajectory differentiates to exactly zero.
    """
    n = traj.n_nodes
    if n < 3:
        raise GridTooCoarse(f"need at least 3 nodes, got {n}")
    if not -n <= i < n:
        raise IndexError(f"node {i} outside trajectory of {n} nodes")
    i %= n
    h = traj.dt
    if i == 0:
        return i, np.array([0, 1, 2]), np.array([0.0, 2.0, -0.5]) / h
    if i == n - 1:
        return i, np.array([n - 3, n - 2, n - 1]), np.array([0.0, -2.0, 1.5]) / h
    return i, np.array([i - 1, i, i + 1]), np.array([0.0, 0.0, 0.5]) / h


def _apply(w: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.tensordot(w, x - x[0], axes=1)


def sqrt_derivative(traj: Trajectory, i: int) -> np.ndarray:
    """d sqrt(rho)/dt at node ``i``."""
    _, idx, w = _stencil(traj, i)
    return hermitize(_apply(w, traj.sqrts[idx]))


def sqrt_derivatives(traj: Trajectory) -> np.ndarray:
    s, h = traj.sqrts, traj.dt
    if traj.n_nodes < 3:
        raise GridTooCoarse(f"need at least 3 nodes, got {traj.n_nodes}")
    d = np.empty_like(s)
    d[1:-1] = 0.5 * (s[2:] - s[:-2]) / h
    d[0] = (2.0 * (s[1] - s[0]) - 0.5 * (s[2] - s[0])) / h
    d[-1] = (1.5 * (s[-1] - s[-3]) - 2.0 * (s[-2] - s[-3])) / h
    return hermitize(d)


def _tr_sq(m: np.ndarray):
    return np.einsum("...ij,...ji->...", m, m).real


def wy_speed(traj: Trajectory, i: int) -> float:
    """sqrt(Tr (d sqrt(rho)/dt)^2) at node ``i``."""
    return float(np.sqrt(max(_tr_sq(sqrt_derivative(traj, i)), 0.0)))


def speed_profile(traj: Trajectory) -> np.ndarray:
    return np.sqrt(np.clip(_tr_sq(sqrt_derivatives(traj)), 0.0, None))


def midpoint_speeds(traj: Trajectory) -> np.ndarray:
    """Speed at the panel midpoints t_i + dt/2 from adjacent roots."""
    diff = traj.sqrts[1:] - traj.sqrts[:-1]
    return np.linalg.norm(diff, axis=(1, 2)) / traj.dt


def _dagger(m: np.ndarray) -> np.ndarray:
    return np.swapaxes(m, -1, -2).conj()


def _align(ref: np.ndarray, vecs: np.ndarray, vals: np.ndarray):
    """Match columns of ``vecs`` (m, d, d) to ``ref`` and fix their phases."""
    overlap = np.abs(_dagger(ref) @ vecs)
    d = vecs.shape[-1]
    if d == 2:
        swap = overlap[:, 0, 1] + overlap[:, 1, 0] > overlap[:, 0, 0] + overlap[:, 1, 1]
        cols = np.where(swap[:, None], [1, 0], [0, 1])
    else:
        cols = np.array([linear_sum_assignment(-o)[1] for o in overlap]).reshape(-1, d)
    vecs = np.take_along_axis(vecs, cols[:, None, :], axis=2)
    vals = np.take_along_axis(vals, cols, axis=1)
    ph = np.einsum("mij,mij->mj", ref.conj(), vecs)
    if np.min(np.abs(ph)) < 0.5:
        raise EigenTrackingFailure("eigenvectors rotate too far between nodes; refine the grid")
    return vecs * (ph.conj() / np.abs(ph))[:, None, :], vals


def _decompose(traj: Trajectory, nodes) -> list[SpeedSample]:
    stencils = [_stencil(traj, i) for i in nodes]
    nodes = np.array([s[0] for s in stencils])
    idx = np.array([s[1] for s in stencils])
    w = np.array([s[2] for s in stencils])

    lam_i = traj.eigenvalues[nodes]
    if lam_i.shape[1] > 1:
        gap = np.min(np.abs(np.diff(lam_i, axis=1)), axis=1)
        bad = np.flatnonzero(gap < DEGENERACY_TOL)
        if bad.size:
            raise EigenTrackingFailure(f"degenerate eigenvalues at node {nodes[bad[0]]}")
    ref = traj.eigenvectors[nodes]
    vecs = traj.eigenvectors[idx].copy()
    vals = traj.eigenvalues[idx].copy()
    for k in range(idx.shape[1]):
        vecs[:, k], vals[:, k] = _align(ref, vecs[:, k], vals[:, k])

    def diff(x):
        # weighted differences from the first stencil node; exact zero if constant
        return np.einsum("mk,mk...->m...", w, x - x[:, :1])

    d_root = hermitize(diff(traj.sqrts[idx]))
    speed2 = np.clip(_tr_sq(d_root), 0.0, None)

    ham = hermitize(1j * diff(vecs) @ _dagger(ref))
    root = traj.sqrts[nodes]
    comm = root @ ham - ham @ root
    skew = -0.5 * _tr_sq(comm)

    d_sqrt_lam = diff(np.sqrt(vals))
    fisher = 4.0 * np.sum(d_sqrt_lam**2, axis=1)
    recomposed = 0.25 * fisher + 2.0 * skew
    pop = (ref * d_sqrt_lam[:, None, :]) @ _dagger(ref)
    cross = np.trace(2j * pop @ comm, axis1=1, axis2=2).real
    pure = np.min(lam_i, axis=1) < PURE_EIG_TOL
    fisher[pure] = recomposed[pure] = cross[pure] = np.nan
    return [
        SpeedSample(
            t=float(traj.t[n]),
            speed=float(np.sqrt(speed2[j])),
            fisher=float(fisher[j]),
            skew=float(skew[j]),
            recomposed=float(recomposed[j]),
            cross=float(cross[j]),
        )
        for j, n in enumerate(nodes)
    ]


def decompose_speed(traj: Trajectory, i: int) -> SpeedSample:
    """Split the squared speed at node ``i`` into Fisher and skew parts.

    With rho = U diag(lambda) U^dagger, the effective Hamiltonian is
    H = i dU/dt U^dagger and

        Tr (d sqrt(rho)/dt)^2 = I_F / 4 + 2 I_WY,
        I_F  = 4 sum_j (d sqrt(lambda_j)/dt)^2,
        I_WY = -Tr [sqrt(rho), H]^2 / 2.

    Eigenvectors on the stencil nodes are matched to those at node ``i`` by
    maximum overlap and phase-fixed so the overlaps are real positive.

    Raises:
        EigenTrackingFailure: degenerate spectrum at the node, or a grid too
            coarse to follow the eigenbasis.
    """
    return _decompose(traj, [i])[0]


def decompose_profile(traj: Trajectory, nodes=None) -> list[SpeedSample]:
    """``decompose_speed`` at every node (or at ``nodes``), evaluated in one batch."""
    return _decompose(traj, range(traj.n_nodes) if nodes is None else nodes)


def speed_profile_csv(samples) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "speed", "fisher", "skew", "recomposed"])
    for s in samples:
        w.writerow([format_float(x) for x in (s.t, s.speed, s.fisher, s.skew, s.recomposed)])
    return buf.getvalue()


def fisher_dephasing(abs_rho01: float, gamma: float) -> float:
    """Closed-form classical Fisher information for equal-population dephasing."""
    if not 0.0 <= abs_rho01 < 0.5 - 1e-12:
        raise SingularInput(f"|rho01| = {abs_rho01} must lie in [0, 1/2)")
    x2 = abs_rho01 * abs_rho01
    return 4.0 * x2 * gamma * gamma / (1.0 - 4.0 * x2)


def skew_dephasing(abs_rho01: float, omega0: float) -> float:
    """Closed-form skew information of H0 = omega0 sigma_z / 2, equal populations."""
    if not 0.0 <= abs_rho01 <= 0.5:
        raise SingularInput(f"|rho01| = {abs_rho01} must lie in [0, 1/2]")
    return 0.5 * omega0 * omega0 * (0.5 - np.sqrt(max(0.25 - abs_rho01 * abs_rho01, 0.0)))


def affinity_slope(traj: Trajectory, i: int) -> float:
    """Tr(sqrt(rho) d sqrt(rho)/dt); zero because Tr rho is conserved."""
    return float(np.trace(traj.sqrts[i] @ sqrt_derivative(traj, i)).real)


def affinity_expansion_check(traj: Trajectory, i: int) -> tuple[float, float]:
    """Compare 1 - A(rho_i, rho_{i+1}) with speed_i^2 dt^2 / 2.

    The left side is evaluated as |sqrt(rho_{i+1}) - sqrt(rho_i)|^2 / 2, which
    equals 1 - A for unit-trace states without the cancellation.
    """
    i, _, _ = _stencil(traj, i)
    if i == 0 or i == traj.n_nodes - 1:
        raise GridTooCoarse("affinity expansion needs an interior node")
    lhs = 0.5 * float(np.linalg.norm(traj.sqrts[i + 1] - traj.sqrts[i]) ** 2)
    rhs = 0.5 * wy_speed(traj, i) ** 2 * traj.dt**2
    return lhs, rhs
