"""Decay-rate models, qubit channels and trajectories.

Conventions (fixed once for the whole package): sigma_z = diag(1, -1) and
sigma_minus = |0><1| moves population from the bottom-right level into the
top-left one, so amplitude damping relaxes towards diag(1, 0).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import integrate, special

from .densmat import (
    DEFAULT_TOL,
    HERMITIAN_TOL,
    SIGMA_Z,
    DensityMatrix,
    StateSqrt,
    _frozen,
    _require_qubit,
    as_density,
    hermitize,
    sqrt_stack,
)
from .errors import (
    DimensionMismatch,
    InvalidState,
    NotHermitian,
    QuadratureFailure,
    ValidationFailure,
)

DEFAULT_QUAD_TOL = 1e-12

SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.conj().T
_EXCITED = SIGMA_PLUS @ SIGMA_MINUS


# -- rate models -------------------------------------------------------------


@dataclass(frozen=True)
class ConstantRate:
    gamma: float

    def at(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.gamma, dtype=float)[()]


@dataclass(frozen=True)
class OhmicZeroT:
    """Zero-temperature dephasing rate for J(w) = w^k / wc^(k-1) e^(-w/wc).

    gamma(t) = wc (1 + wc^2 t^2)^(-k/2) Gamma(k) sin(k arctan(wc t))
    """

    k: float
    omega_c: float = 1.0

    def __post_init__(self):
        if not (self.k > 0 and self.omega_c > 0):
            raise ValueError("OhmicZeroT needs k > 0 and omega_c > 0")

    def at(self, t):
        x = self.omega_c * np.asarray(t, dtype=float)
        return (
            self.omega_c
            * (1.0 + x * x) ** (-self.k / 2.0)
            * special.gamma(self.k)
            * np.sin(self.k * np.arctan(x))
        )


@dataclass(frozen=True)
class ShiftedRate:
    """``base`` evaluated at ``t0 + t``."""

    base: "RateModel"
    t0: float

    def at(self, t):
        return self.base.at(self.t0 + np.asarray(t, dtype=float))


RateModel = Union[ConstantRate, OhmicZeroT, ShiftedRate]


def gamma_at(rate: RateModel, t):
    return rate.at(t)


def gamma_integral(rate: RateModel, t: float, quad_tol: float = DEFAULT_QUAD_TOL) -> float:
    """Integral of the rate over [0, t] (adaptive quadrature unless constant)."""
    if t == 0:
        return 0.0
    if isinstance(rate, ConstantRate):
        return rate.gamma * t
    val, err, info = integrate.quad(
        lambda s: float(rate.at(s)), 0.0, t, epsabs=quad_tol, epsrel=0.0, limit=500,
        full_output=1,
    )[:3]
    if err > quad_tol or not np.isfinite(val):
        raise QuadratureFailure(
            f"rate integral to t={t:g}: error estimate {err:.2e} exceeds {quad_tol:g}"
        )
    return float(val)


_GL_LO = np.polynomial.legendre.leggauss(10)
_GL_HI = np.polynomial.legendre.leggauss(20)


def _panel_integrals(rate: RateModel, a: np.ndarray, b: np.ndarray, rule) -> np.ndarray:
    x, w = rule
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    nodes = mid[:, None] + half[:, None] * x[None, :]
    return half * (rate.at(nodes) @ w)


def cumulative_gamma(
    rate: RateModel, t_grid: np.ndarray, quad_tol: float = DEFAULT_QUAD_TOL
) -> np.ndarray:
    """Rate integral from 0 to every node of ``t_grid`` (t_grid[0] must be 0).

    Panels are integrated with 10- and 20-point Gauss-Legendre rules; the
    difference serves as the error estimate. Panels that miss the budget
    fall back to :func:`gamma_integral`'s adaptive quadrature.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if isinstance(rate, ConstantRate):
        return rate.gamma * t_grid
    a, b = t_grid[:-1], t_grid[1:]
    lo = _panel_integrals(rate, a, b, _GL_LO)
    hi = _panel_integrals(rate, a, b, _GL_HI)
    budget = quad_tol / max(len(a), 1)
    est = np.abs(hi - lo)
    bad = np.flatnonzero(est > budget) if est.sum() > quad_tol else []
    for j in bad:
        shifted = ShiftedRate(rate, a[j])
        hi[j] = gamma_integral(shifted, b[j] - a[j], budget)
    out = np.empty_like(t_grid)
    out[0] = 0.0
    np.cumsum(hi, out=out[1:])
    return out


# -- channels ------------------------------------------------------------------


@dataclass(frozen=True)
class Dephasing:
    omega0: float
    rate: RateModel

    def generator(self, t: float, rho: np.ndarray) -> np.ndarray:
        h0 = 0.5 * self.omega0 * SIGMA_Z
        g = float(self.rate.at(t))
        return -1j * (h0 @ rho - rho @ h0) + 0.5 * g * (SIGMA_Z @ rho @ SIGMA_Z - rho)


@dataclass(frozen=True)
class AmplitudeDamping:
    rate: RateModel

    def generator(self, t: float, rho: np.ndarray) -> np.ndarray:
        g = float(self.rate.at(t))
        jump = SIGMA_MINUS @ rho @ SIGMA_PLUS
        return 0.5 * g * (2.0 * jump - _EXCITED @ rho - rho @ _EXCITED)


@dataclass(frozen=True)
class Unitary:
    h: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise DimensionMismatch(f"Hamiltonian must be square, got {h.shape}")
        if np.max(np.abs(h - h.conj().T)) > HERMITIAN_TOL:
            raise NotHermitian("Unitary channel needs a Hermitian Hamiltonian")
        object.__setattr__(self, "h", _frozen(h))

    def generator(self, t: float, rho: np.ndarray) -> np.ndarray:
        return -1j * (self.h @ rho - rho @ self.h)


ChannelSpec = Union[Dephasing, AmplitudeDamping, Unitary]


def dephasing_state(rho0, omega0: float, rate: RateModel, t: float,
                    quad_tol: float = DEFAULT_QUAD_TOL) -> DensityMatrix:
    """Closed-form dephasing: populations frozen, rho01 -> rho01 e^{-G(t) - i w0 t}."""
    rho0 = as_density(rho0)
    _require_qubit(rho0)
    return _dephasing_nodes(rho0, omega0, np.array([t]), np.array([gamma_integral(rate, t, quad_tol)]))[0]


def damping_state(rho0, rate: RateModel, t: float,
                  quad_tol: float = DEFAULT_QUAD_TOL) -> DensityMatrix:
    """Closed-form amplitude damping towards diag(1, 0)."""
    rho0 = as_density(rho0)
    _require_qubit(rho0)
    return _damping_nodes(rho0, np.array([gamma_integral(rate, t, quad_tol)]))[0]


def _dephasing_stack(rho0: DensityMatrix, omega0, t, gcum) -> np.ndarray:
    out = np.repeat(rho0.mat[None, :, :], len(t), axis=0)
    factor = np.exp(-gcum) * np.exp(-1j * omega0 * t)
    out[:, 0, 1] = rho0.mat[0, 1] * factor
    out[:, 1, 0] = np.conj(out[:, 0, 1])
    return out


def _damping_stack(rho0: DensityMatrix, gcum) -> np.ndarray:
    r11 = rho0.mat[1, 1].real
    decay = np.exp(-gcum)
    out = np.empty((len(gcum), 2, 2), dtype=complex)
    out[:, 1, 1] = r11 * decay
    out[:, 0, 0] = rho0.mat[0, 0].real + r11 * (1.0 - decay)
    out[:, 0, 1] = rho0.mat[0, 1] * np.sqrt(decay)
    out[:, 1, 0] = np.conj(out[:, 0, 1])
    return out


def _dephasing_nodes(rho0, omega0, t, gcum):
    return [DensityMatrix(_frozen(m)) for m in _dephasing_stack(rho0, omega0, t, gcum)]


def _damping_nodes(rho0, gcum):
    return [DensityMatrix(_frozen(m)) for m in _damping_stack(rho0, gcum)]


# -- trajectories --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States sampled on a uniform time grid, with their square roots.

    Arrays are stacked along the first axis: ``states[i]`` is the state at
    ``t[i]``. ``min_eig_raw`` keeps the smallest eigenvalue before clamping.
    """

    t: np.ndarray
    states: np.ndarray
    sqrts: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    gamma_cum: np.ndarray
    min_eig_raw: np.ndarray = field(repr=False)

    @classmethod
    def from_states(cls, t, states, gamma_cum=None, tol: float = DEFAULT_TOL) -> "Trajectory":
        t = np.asarray(t, dtype=float)
        states = hermitize(np.asarray(states, dtype=complex))
        if len(t) != len(states):
            raise DimensionMismatch("time grid and state stack lengths differ")
        if len(t) > 1:
            dt = np.diff(t)
            if np.any(dt <= 0):
                raise ValueError("time grid must be strictly increasing")
            if np.max(np.abs(dt - dt.mean())) > 1e-12 * max(1.0, abs(t[-1])):
                raise ValueError("time grid must be uniform")
        trace = np.einsum("nii->n", states).real
        bad = np.flatnonzero(np.abs(trace - 1.0) > tol)
        if bad.size:
            raise ValidationFailure(
                f"node {bad[0]} (t={t[bad[0]]:g}) has |Tr - 1| = {abs(trace[bad[0]] - 1):.3e}"
            )
        raw_w = np.linalg.eigvalsh(states)
        min_raw = raw_w[:, 0]
        bad = np.flatnonzero(min_raw < -tol)
        if bad.size:
            raise ValidationFailure(
                f"node {bad[0]} (t={t[bad[0]]:g}) has eigenvalue {min_raw[bad[0]]:.3e}"
            )
        clamp = np.flatnonzero(min_raw < 0.0)
        if clamp.size:
            w, v, _ = sqrt_stack(states[clamp])
            fixed = hermitize((v * w[:, None, :]) @ np.swapaxes(v, 1, 2).conj())
            states[clamp] = fixed / np.einsum("nii->n", fixed).real[:, None, None]
        w, v, roots = sqrt_stack(states)
        if gamma_cum is None:
            gamma_cum = np.zeros_like(t)
        arrays = [t, states, roots, w, v, np.asarray(gamma_cum, dtype=float), min_raw]
        for a in arrays:
            a.setflags(write=False)
        return cls(*arrays)

    @property
    def n_nodes(self) -> int:
        return len(self.t)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def tau(self) -> float:
        return float(self.t[-1] - self.t[0])

    def state(self, i: int) -> DensityMatrix:
        return DensityMatrix(self.states[i])

    def root(self, i: int) -> StateSqrt:
        return StateSqrt(
            rho=self.state(i),
            eigenvalues=self.eigenvalues[i],
            eigenvectors=self.eigenvectors[i],
            sqrt=self.sqrts[i],
        )

    def to_csv(self) -> str:
        if self.states.shape[1] != 2:
            raise DimensionMismatch("CSV export is defined for qubit trajectories")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "rho00_re", "rho00_im", "rho01_re", "rho01_im",
                    "rho10_re", "rho10_im", "rho11_re", "rho11_im", "gamma_cum"])
        for ti, m, g in zip(self.t, self.states, self.gamma_cum):
            flat = m.reshape(-1)
            row = [ti]
            for z in flat:
                row += [z.real, z.imag]
            row.append(g)
            w.writerow([format_float(x) for x in row])
        return buf.getvalue()


def format_float(x: float) -> str:
    return f"{float(x):.17g}"


def time_grid(tau: float, steps: int) -> np.ndarray:
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if steps < 2:
        raise ValueError(f"need at least 2 steps, got {steps}")
    return np.linspace(0.0, tau, steps + 1)


def trajectory_from_analytic(rho0, channel: ChannelSpec, tau: float, steps: int,
                             quad_tol: float = DEFAULT_QUAD_TOL) -> Trajectory:
    """Sample the closed-form dephasing or damping solution on a uniform grid."""
    rho0 = as_density(rho0)
    _require_qubit(rho0)
    t = time_grid(tau, steps)
    gcum = cumulative_gamma(channel.rate, t, quad_tol) if not isinstance(channel, Unitary) else None
    if isinstance(channel, Dephasing):
        states = _dephasing_stack(rho0, channel.omega0, t, gcum)
    elif isinstance(channel, AmplitudeDamping):
        states = _damping_stack(rho0, gcum)
    else:
        raise TypeError("closed forms exist only for Dephasing and AmplitudeDamping")
    return Trajectory.from_states(t, states, gcum)


def integrate_master(rho0, channel: ChannelSpec, tau: float, steps: int,
                     quad_tol: float = DEFAULT_QUAD_TOL) -> Trajectory:
    """Fixed-step classical RK4 integration of the channel's master equation."""
    rho0 = as_density(rho0)
    if isinstance(channel, Unitary) and channel.h.shape[0] != rho0.dim:
        raise DimensionMismatch("Hamiltonian and state dimensions differ")
    if not isinstance(channel, Unitary):
        _require_qubit(rho0)
    t = time_grid(tau, steps)
    h = t[1] - t[0]
    f = channel.generator
    out = np.empty((len(t),) + rho0.mat.shape, dtype=complex)
    rho = np.array(rho0.mat)
    out[0] = rho
    for n in range(steps):
        tn = t[0] + n * h
        k1 = f(tn, rho)
        k2 = f(tn + 0.5 * h, rho + 0.5 * h * k1)
        k3 = f(tn + 0.5 * h, rho + 0.5 * h * k2)
        k4 = f(tn + h, rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[n + 1] = rho
    gcum = None if isinstance(channel, Unitary) else cumulative_gamma(channel.rate, t, quad_tol)
    try:
        return Trajectory.from_states(t, out, gcum)
    except InvalidState as exc:  # pragma: no cover - from_states raises ValidationFailure
        raise ValidationFailure(str(exc)) from exc


def advance(rho0, channel: ChannelSpec, t: float,
            quad_tol: float = DEFAULT_QUAD_TOL) -> DensityMatrix:
    """State reached from ``rho0`` after time ``t`` (closed form)."""
    if t == 0:
        return as_density(rho0)
    if isinstance(channel, Dephasing):
        return dephasing_state(rho0, channel.omega0, channel.rate, t, quad_tol)
    if isinstance(channel, AmplitudeDamping):
        return damping_state(rho0, channel.rate, t, quad_tol)
    return as_density(integrate_master(rho0, channel, t, max(8, int(np.ceil(2000 * t)))).states[-1])


def shift_origin(channel: ChannelSpec, t0: float) -> ChannelSpec:
    """Channel whose rate clock starts at ``t0``."""
    if t0 == 0 or isinstance(channel, Unitary):
        return channel
    if isinstance(channel, Dephasing):
        return Dephasing(channel.omega0, ShiftedRate(channel.rate, t0))
    return AmplitudeDamping(ShiftedRate(channel.rate, t0))
