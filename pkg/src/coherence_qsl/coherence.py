"""Skew-information coherence in the computational basis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .densmat import StateSqrt, as_density, sqrt_psd, _check_dims
from .errors import DegenerateState, UnsupportedDimension


@dataclass(frozen=True)
class IncoherentState:
    probs: np.ndarray

    def matrix(self) -> np.ndarray:
        return np.diag(self.probs).astype(complex)


@dataclass(frozen=True)
class CoherenceValue:
    """Coherence ``c`` and its addressed angle arccos(sqrt(1 - c))."""

    c: float
    addressed_angle: float


def _root_diagonal(rho) -> np.ndarray:
    root = rho.sqrt if isinstance(rho, StateSqrt) else sqrt_psd(rho).sqrt
    return np.diagonal(root).real


def addressed_angle(c):
    """arccos(sqrt(1 - c)), evaluated as arcsin(sqrt(c)) to keep small c exact."""
    return np.arcsin(np.sqrt(np.clip(c, 0.0, 1.0)))


def coherence_stack(sqrts: np.ndarray) -> np.ndarray:
    """Coherence of every root in an ``(n, d, d)`` stack.

    Since sum_kl |<k|sqrt(rho)|l>|^2 = Tr rho = 1, the coherence
    1 - sum_k <k|sqrt(rho)|k>^2 is the off-diagonal mass of the root. Summing
    that mass directly avoids the cancellation in 1 - (1 - tiny).
    """
    mass = np.abs(np.asarray(sqrts)) ** 2
    off_mask = ~np.eye(mass.shape[-1], dtype=bool)
    off = np.sum(mass * off_mask, axis=(-2, -1))
    diag = np.sum(np.einsum("...ii->...i", mass), axis=-1)
    return np.clip(off / (off + diag), 0.0, 1.0)


def coherence_skew(rho) -> CoherenceValue:
    """C = 1 - sum_k <k|sqrt(rho)|k>^2."""
    root = rho.sqrt if isinstance(rho, StateSqrt) else sqrt_psd(rho).sqrt
    c = float(coherence_stack(root))
    return CoherenceValue(c=c, addressed_angle=float(addressed_angle(c)))


def _oracle_root(m: np.ndarray) -> np.ndarray:
    # Deliberately avoids sqrt_psd so the scan is an independent check.
    if m.shape[0] == 2:
        s = np.sqrt(max(np.linalg.det(m).real, 0.0))
        t = np.sqrt(np.trace(m).real + 2.0 * s)
        return (m + s * np.eye(2)) / t
    return np.asarray(scipy.linalg.sqrtm(m), dtype=complex)


def _simplex_grid(dim: int, grid_points: int) -> np.ndarray:
    if dim == 2:
        q = np.linspace(0.0, 1.0, grid_points + 1)
        return np.column_stack([q, 1.0 - q])
    # d = 3: about grid_points nodes on the triangle
    m = max(2, int(np.sqrt(2.0 * grid_points)))
    i, j = np.meshgrid(np.arange(m + 1), np.arange(m + 1), indexing="ij")
    keep = i + j <= m
    i, j = i[keep], j[keep]
    return np.column_stack([i, j, m - i - j]) / m


def coherence_bruteforce(rho, grid_points: int = 10_000, return_best: bool = False):
    """Minimize 1 - A^2(rho, sigma) over a grid of incoherent sigma.

    Supports d = 2 (exhaustive line scan) and d = 3 (simplex scan). Returns
    the minimum, or ``(minimum, best_probs)`` when ``return_best`` is set.
    """
    rho = as_density(rho)
    if rho.dim > 3:
        raise UnsupportedDimension(f"brute-force scan supports d <= 3, got d={rho.dim}")
    diag = np.diagonal(_oracle_root(rho.mat)).real
    probs = _simplex_grid(rho.dim, grid_points)
    aff = np.sqrt(probs) @ diag
    k = int(np.argmax(aff))
    best = float(1.0 - aff[k] ** 2)
    if return_best:
        return best, probs[k]
    return best


def closest_incoherent(rho) -> IncoherentState:
    """Incoherent state of maximal affinity: p_i proportional to <i|sqrt(rho)|i>^2."""
    diag2 = _root_diagonal(rho) ** 2
    total = diag2.sum()
    if total <= 0.0:
        raise DegenerateState("all diagonal entries of sqrt(rho) vanish")
    return IncoherentState(probs=diag2 / total)


def delta_c(rho0, rho_tau) -> float:
    """Signed change of addressed angle, positive when coherence grows."""
    r0 = rho0.rho if isinstance(rho0, StateSqrt) else as_density(rho0)
    rt = rho_tau.rho if isinstance(rho_tau, StateSqrt) else as_density(rho_tau)
    _check_dims(r0, rt)
    return coherence_skew(rho_tau).addressed_angle - coherence_skew(rho0).addressed_angle

