"""Oracle and property suites behind ``coherence-qsl verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coherence import closest_incoherent, coherence_bruteforce, coherence_skew, delta_c
from .densmat import (
    affinity,
    angle,
    equal_population_transform,
    qubit_from_theta,
    random_density,
)
from .dynamics import (
    AmplitudeDamping,
    ConstantRate,
    Dephasing,
    OhmicZeroT,
    cumulative_gamma,
    integrate_master,
    trajectory_from_analytic,
)
from .metric import decompose_speed
from .qsl import (
    GeodesicPath,
    dephasing_arc_length,
    geodesic_triangle_check,
    path_length,
    tau_csl,
)

SUITES = ("oracle", "properties", "all")


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.tol)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name}: residual={self.residual:.3e} tol={self.tol:.1e}"


def _worst(values) -> float:
    """Largest residual, clipped at 0; any NaN makes the check fail."""
    return max(float(np.max(values)), 0.0) if len(values) else float("nan")


def check_coherence_oracle(rng, n=1000, grid=10_000) -> list[Check]:
    errs, gaps = [], []
    for _ in range(n):
        rho = random_density(2, rng)
        brute, best = coherence_bruteforce(rho, grid, return_best=True)
        errs.append(abs(coherence_skew(rho).c - brute))
        star = np.diag(closest_incoherent(rho).probs)
        gaps.append(affinity(rho, np.diag(best)) - affinity(rho, star))
    return [
        Check("coherence closed form vs brute-force grid", _worst(errs), 2e-4),
        Check("closest incoherent state beats every grid state", _worst(gaps), 1e-6),
    ]


def check_rate_integral(n_panels=1_000_000) -> Check:
    rate = OhmicZeroT(4.0, 1.0)
    t = np.linspace(0.0, 2.0, n_panels + 1)
    g = rate.at(t)
    ref = float(np.sum(0.5 * (g[1:] + g[:-1])) * (t[1] - t[0]))
    val = cumulative_gamma(rate, np.linspace(0.0, 2.0, 9))[-1]
    return Check("Ohmic rate integral vs 1e6-panel trapezoid", abs(val - ref), 1e-8)


def check_integrator() -> list[Check]:
    rho = qubit_from_theta(math.pi / 2)
    out = []
    for name, ch in (("dephasing", Dephasing(0.0, ConstantRate(2.0))),
                     ("damping", AmplitudeDamping(ConstantRate(2.0)))):
        a = trajectory_from_analytic(rho, ch, 0.5, 2000)
        b = integrate_master(rho, ch, 0.5, 2000)
        err = float(np.max(np.linalg.norm(a.states - b.states, axis=(1, 2))))
        out.append(Check(f"RK4 vs closed form ({name})", err, 1e-8))
    return out


def check_arc_length() -> Check:
    rho = qubit_from_theta(math.pi / 2)
    tr = trajectory_from_analytic(rho, Dephasing(0.0, ConstantRate(2.0)), 0.5, 2000)
    exact = dephasing_arc_length(0.5, abs(tr.states[-1][0, 1]))
    return Check("midpoint path length vs closed-form arc", abs(path_length(tr) - exact), 1e-4)


def check_theorem(rng, n=200) -> list[Check]:
    ratios, gaps = [], []
    for _ in range(n):
        theta = rng.uniform(0.0, math.pi)
        phase = rng.uniform(0.0, 2 * math.pi)
        gamma = rng.uniform(0.5, 4.0)
        tau = rng.uniform(0.1, 2.0)
        if rng.random() < 0.5:
            ch = Dephasing(rng.uniform(0.0, 2.0), ConstantRate(gamma))
        else:
            ch = AmplitudeDamping(ConstantRate(gamma))
        tr = trajectory_from_analytic(qubit_from_theta(theta, phase), ch, tau,
                                      max(8, int(round(4000 * tau))))
        rep = tau_csl(tr)
        ratios.append(rep.ratio - 1.0)
        gaps.append(abs(rep.delta_c) - rep.path_length)
    return [
        Check("tau_CSL / tau <= 1 over random draws", _worst(ratios), 1e-5),
        Check("path length >= |Delta_C|", _worst(gaps), 1e-6),
    ]


def check_geodesics(rng, n=1000) -> Check:
    errs = []
    for _ in range(n):
        path = GeodesicPath(random_density(2, rng), random_density(2, rng))
        total, split = geodesic_triangle_check(path, rng.uniform())
        errs.append(abs(total - split))
    return Check("geodesic triangle equality", _worst(errs), 1e-10)


def check_triangle_inequality(rng, n=1000) -> Check:
    excess = []
    for _ in range(n):
        a, b, c = (random_density(2, rng) for _ in range(3))
        excess.append(angle(a, c) - angle(a, b) - angle(b, c))
    return Check("angle triangle inequality", _worst(excess), 1e-9)


def check_decomposition() -> Check:
    tr = trajectory_from_analytic(qubit_from_theta(math.pi / 3),
                                  Dephasing(1.0, ConstantRate(2.0)), 1.0, 4000)
    errs = []
    for i in range(1, tr.n_nodes - 1):
        if tr.eigenvalues[i].min() <= 1e-6:
            continue
        s = decompose_speed(tr, i)
        errs.append(abs(s.speed**2 - s.recomposed) / s.speed**2)
    return Check("speed^2 = I_F/4 + 2 I_WY", _worst(errs), 1e-5)


def check_equal_population(rng, n=1000) -> Check:
    errs = []
    for _ in range(n):
        _, out = equal_population_transform(random_density(2, rng))
        errs.append(np.max(np.abs(np.diagonal(out.mat).real - 0.5)))
    return Check("equal-population transform", _worst(errs), 1e-12)


def check_delta_antisymmetry(rng, n=200) -> Check:
    errs = []
    for _ in range(n):
        a, b = random_density(2, rng), random_density(2, rng)
        errs.append(abs(delta_c(a, b) + delta_c(b, a)))
    return Check("Delta_C antisymmetry", _worst(errs), 0.0)


def run_suite(suite: str, seed: int = 0) -> list[Check]:
    if suite not in SUITES:
        raise ValueError(f"suite must be one of {SUITES}, got {suite!r}")
    rng = np.random.default_rng(seed)
    checks: list[Check] = []
    if suite in ("oracle", "all"):
        checks += check_coherence_oracle(rng)
        checks.append(check_rate_integral())
        checks += check_integrator()
        checks.append(check_arc_length())
    if suite in ("properties", "all"):
        checks += check_theorem(rng)
        checks.append(check_geodesics(rng))
        checks.append(check_triangle_inequality(rng))
        checks.append(check_decomposition())
        checks.append(check_equal_population(rng))
        checks.append(check_delta_antisymmetry(rng))
    return checks
