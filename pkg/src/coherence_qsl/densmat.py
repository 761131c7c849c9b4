"""Density matrices, principal square roots, affinity and angle distance.

Matrices are plain ``numpy`` complex arrays. Qubit matrices use the layout

    [[1 - rho11, rho01],
     [conj(rho01), rho11]]

i.e. index 0 is the top-left ("ground") level and index 1 the bottom-right.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    EigenFailure,
    NotHermitian,
    NotPositive,
    TraceDeviation,
)

HERMITIAN_TOL = 1e-12
DEFAULT_TOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated density matrix. Build with :func:`validate_density`."""

    mat: np.ndarray

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.mat, dtype=dtype)

    def __repr__(self) -> str:
        return f"DensityMatrix({np.array2string(self.mat, precision=6)})"


@dataclass(frozen=True, eq=False)
class StateSqrt:
    """A density matrix with its eigendecomposition and principal root.

    Eigenvalues are sorted in descending order; eigenvectors are the
    matching columns of ``eigenvectors``.
    """

    rho: DensityMatrix
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sqrt: np.ndarray


def hermitize(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    return 0.5 * (m + np.swapaxes(m, -1, -2).conj())


def _eigh(m: np.ndarray):
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigenFailure(f"eigendecomposition did not converge: {exc}") from exc
    if not np.all(np.isfinite(w)):
        raise EigenFailure("eigendecomposition produced non-finite eigenvalues")
    return w, v


def validate_density(m, tol: float = DEFAULT_TOL) -> DensityMatrix:
    """Check and clean up a candidate density matrix.

    Args:
        m: Square complex array.
        tol: Allowed negative eigenvalue magnitude and trace drift.

    Returns:
        DensityMatrix that is exactly Hermitian, has eigenvalues in [0, 1]
        and unit trace.

    Raises:
        NotHermitian, NotPositive, TraceDeviation.
    """
    if isinstance(m, DensityMatrix):
        return m
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    herm_err = np.max(np.abs(m - m.conj().T))
    if herm_err > HERMITIAN_TOL:
        raise NotHermitian(f"max |M - M^dagger| = {herm_err:.3e}")
    m = hermitize(m)
    trace = np.trace(m).real
    if abs(trace - 1.0) > tol:
        raise TraceDeviation(f"|Tr - 1| = {abs(trace - 1.0):.3e} exceeds {tol:g}")
    w, v = _eigh(m)
    if w[0] < -tol:
        raise NotPositive(f"minimum eigenvalue {w[0]:.3e} below -{tol:g}")
    if w[0] < 0.0 or w[-1] > 1.0:
        w = np.clip(w, 0.0, 1.0)
        m = hermitize((v * w) @ v.conj().T)
        trace = np.trace(m).real
    if trace != 1.0:
        m = m / trace
    return DensityMatrix(_frozen(m))


def as_density(m) -> DensityMatrix:
    return m if isinstance(m, DensityMatrix) else validate_density(m)


def sqrt_psd(rho) -> StateSqrt:
    """Principal square root through the eigendecomposition."""
    rho = as_density(rho)
    w, v = _eigh(rho.mat)
    w, v = w[::-1], v[:, ::-1]
    w = np.clip(w, 0.0, None)
    root = hermitize((v * np.sqrt(w)) @ v.conj().T)
    return StateSqrt(rho=rho, eigenvalues=w, eigenvectors=v, sqrt=_frozen(root))


def sqrt_stack(states: np.ndarray):
    """Vectorized :func:`sqrt_psd` over an ``(n, d, d)`` stack.

    Returns ``(eigenvalues, eigenvectors, sqrts)`` with eigenvalues descending
    and clamped at zero.
    """
    w, v = _eigh(hermitize(states))
    w, v = w[:, ::-1], v[:, :, ::-1]
    w = np.clip(w, 0.0, None)
    roots = hermitize((v * np.sqrt(w)[:, None, :]) @ np.swapaxes(v, 1, 2).conj())
    return w, v, roots


def _check_dims(a: DensityMatrix, b: DensityMatrix) -> None:
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimensions differ: {a.dim} vs {b.dim}")


def _root(x) -> np.ndarray:
    if isinstance(x, StateSqrt):
        return x.sqrt
    return sqrt_psd(x).sqrt


def affinity(a, b) -> float:
    """Tr(sqrt(a) sqrt(b)), clamped to [0, 1]."""
    a_rho = a.rho if isinstance(a, StateSqrt) else as_density(a)
    b_rho = b.rho if isinstance(b, StateSqrt) else as_density(b)
    _check_dims(a_rho, b_rho)
    val = np.sum(_root(a) * _root(b).T)
    return float(min(1.0, max(0.0, val.real)))


def angle(a, b) -> float:
    """Angle distance arccos(affinity(a, b)) in [0, pi/2].

    Both roots have unit Frobenius norm, so 1 - A = |sqrt(a) - sqrt(b)|^2 / 2
    and the angle is evaluated as 2 arcsin(|sqrt(a) - sqrt(b)| / 2), which
    keeps full precision for nearby states.
    """
    a_rho = a.rho if isinstance(a, StateSqrt) else as_density(a)
    b_rho = b.rho if isinstance(b, StateSqrt) else as_density(b)
    _check_dims(a_rho, b_rho)
    return chord_angle(_root(a), _root(b))


def chord_angle(root_a: np.ndarray, root_b: np.ndarray) -> float:
    dist = np.linalg.norm(np.asarray(root_a) - np.asarray(root_b))
    return float(2.0 * np.arcsin(min(1.0, dist / 2.0)))


def qubit_from_theta(theta: float, phase: float = 0.0) -> DensityMatrix:
    """Pure qubit with rho11 = sin^2(theta/2), rho01 = sin cos e^{i phase}."""
    s, c = np.sin(theta / 2.0), np.cos(theta / 2.0)
    off = s * c * np.exp(1j * phase)
    m = np.array([[c * c, off], [np.conj(off), s * s]], dtype=complex)
    return DensityMatrix(_frozen(m))


def qubit(rho11: float, rho01: complex) -> DensityMatrix:
    """Qubit state from its excited population and coherence."""
    m = np.array([[1.0 - rho11, rho01], [np.conj(rho01), rho11]], dtype=complex)
    return validate_density(m)


def _require_qubit(rho: DensityMatrix) -> None:
    if rho.dim != 2:
        raise DimensionMismatch(f"operation is defined for qubits only, got d={rho.dim}")


def equal_population_transform(rho):
    """Rotate a qubit into a frame where both populations equal 1/2.

    Uses U = [[1, i e^{i phi}], [1, -i e^{i phi}]] / sqrt(2) with
    phi = Arg(rho01) (phi = 0 when rho01 vanishes).

    Returns:
        (U, U rho U^dagger)
    """
    rho = as_density(rho)
    _require_qubit(rho)
    r01 = rho.mat[0, 1]
    phi = float(np.angle(r01)) if abs(r01) > 0 else 0.0
    e = 1j * np.exp(1j * phi)
    u = np.array([[1.0, e], [1.0, -e]], dtype=complex) / np.sqrt(2.0)
    out = hermitize(u @ rho.mat @ u.conj().T)
    return _frozen(u), DensityMatrix(_frozen(out))


def bloch_vector(rho) -> tuple[float, float, float]:
    rho = as_density(rho)
    _require_qubit(rho)
    m = rho.mat
    return (
        float(2.0 * m[0, 1].real),
        float(-2.0 * m[0, 1].imag),
        float((m[0, 0] - m[1, 1]).real),
    )


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Hilbert-Schmidt (Ginibre) random state; ``rank=1`` gives pure states."""
    k = dim if rank is None else rank
    g = rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k))
    m = g @ g.conj().T
    return validate_density(hermitize(m / np.trace(m).real))


def matrix_to_json(m) -> list:
    """Row-major nested list of ``[re, im]`` pairs."""
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"expected an n x n x 2 array, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]
