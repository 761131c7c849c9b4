import math

import numpy as np
import pytest

from coherence_qsl.coherence import delta_c
from coherence_qsl.densmat import angle, qubit, qubit_from_theta, random_density, sqrt_psd
from coherence_qsl.dynamics import (
    AmplitudeDamping,
    ConstantRate,
    Dephasing,
    Trajectory,
    trajectory_from_analytic,
)
from coherence_qsl.errors import GridTooCoarse, ZeroSpeed
from coherence_qsl.qsl import (
    GeodesicPath,
    dephasing_arc_length,
    geodesic_point,
    geodesic_trace_closed_form,
    geodesic_trace_profile,
    geodesic_trajectory,
    geodesic_triangle_check,
    path_length,
    saturation_check,
    tau_csl,
)

HALF = np.eye(2) / 2


def dephasing_run(theta=math.pi / 2, omega0=0.0, gamma=2.0, tau=0.5):
    steps = int(round(4000 * tau))
    return trajectory_from_analytic(qubit_from_theta(theta), Dephasing(omega0, ConstantRate(gamma)), tau, steps)


def test_constant_trajectory_is_vacuous():
    t = np.linspace(0, 1, 16)
    tr = Trajectory.from_states(t, np.repeat(qubit(0.3, 0.2).mat[None], 16, axis=0))
    rep = tau_csl(tr)
    assert rep.delta_c == 0.0 and rep.tau_csl == 0.0 and rep.vacuous


def test_tiny_coherence_jump_respects_bound():
    # 1 - sum(diag^2) would cancel to ~1e-16 here and inflate Delta_C twentyfold
    t = np.linspace(0, 1, 16)
    states = np.repeat(HALF[None], 16, axis=0).astype(complex)
    states[-1] = qubit(0.5, 1e-9).mat
    rep = tau_csl(Trajectory.from_states(t, states))
    assert abs(rep.delta_c) == pytest.approx(1e-9, rel=1e-6)
    assert rep.ratio <= 1 + 1e-5


def test_zero_speed_with_coherence_change_raises(monkeypatch):
    import coherence_qsl.qsl as qsl_mod

    tr = dephasing_run()
    monkeypatch.setattr(qsl_mod, "midpoint_speeds", lambda traj: np.zeros(traj.n_nodes - 1))
    with pytest.raises(ZeroSpeed):
        tau_csl(tr)


def test_too_few_nodes():
    tr = dephasing_run(tau=0.5)
    short = Trajectory.from_states(tr.t[:4], tr.states[:4])
    with pytest.raises(GridTooCoarse):
        tau_csl(short)


def test_saturating_dephasing():
    rep = tau_csl(dephasing_run())
    assert rep.ratio == pytest.approx(1.0, abs=1e-4)
    assert rep.delta_c < 0
    assert abs(rep.delta_c) == pytest.approx(dephasing_arc_length(0.5, 0.5 * math.exp(-1)), abs=1e-12)


def test_free_hamiltonian_breaks_saturation():
    assert tau_csl(dephasing_run(omega0=1.0)).ratio < 1 - 1e-3


def test_unequal_populations_break_saturation():
    assert tau_csl(dephasing_run(theta=math.pi / 3)).ratio < 1 - 1e-3


def test_report_fields_consistent():
    rep = tau_csl(dephasing_run(theta=1.0, omega0=0.5))
    assert rep.avg_speed == pytest.approx(rep.path_length / rep.tau, rel=1e-15)
    assert rep.tau_csl == pytest.approx(abs(rep.delta_c) / rep.avg_speed, rel=1e-15)
    assert rep.ratio == pytest.approx(rep.tau_csl / rep.tau, rel=1e-15)
    assert set(rep.to_dict()) == {"delta_c", "path_length", "avg_speed", "tau", "tau_csl", "ratio", "vacuous"}


def test_arc_length_examples():
    assert dephasing_arc_length(0.5, 0.0) == pytest.approx(math.pi / 4, abs=1e-15)
    assert dephasing_arc_length(0.3, 0.3) == 0.0
    # direct evaluation of (pi/2 - arcsin(2 x)) / 2 at x = e^-1 / 2
    value = dephasing_arc_length(0.5, 0.1839397)
    assert value == pytest.approx(0.5 * (math.pi / 2 - math.asin(0.3678794)), abs=1e-15)
    assert value == pytest.approx(0.5970344, abs=1e-7)
    with pytest.raises(ValueError):
        dephasing_arc_length(0.6, 0.1)


def test_path_length_matches_arc_length():
    tr = dephasing_run(tau=1.0)
    exact = dephasing_arc_length(0.5, 0.5 * math.exp(-2))
    assert path_length(tr) == pytest.approx(exact, abs=1e-6)


def test_path_length_dominates_angle(rng):
    for _ in range(10):
        rho0 = random_density(2, rng)
        tr = trajectory_from_analytic(rho0, AmplitudeDamping(ConstantRate(rng.uniform(0.5, 3))), 1.0, 2000)
        assert path_length(tr) >= angle(tr.states[0], tr.states[-1]) - 1e-9
        assert path_length(tr) >= abs(delta_c(tr.states[0], tr.states[-1])) - 1e-9


def test_geodesic_endpoints(plus, rng):
    path = GeodesicPath(plus, HALF)
    np.testing.assert_array_equal(geodesic_point(path, 0.0).mat, path.rho0.mat)
    np.testing.assert_array_equal(geodesic_point(path, 1.0).mat, path.rho_tau.mat)
    rho = random_density(2, rng)
    same = GeodesicPath(rho, rho)
    for p in (0.2, 0.5, 0.9):
        np.testing.assert_allclose(geodesic_point(same, p).mat, rho.mat, atol=1e-14)
    with pytest.raises(ValueError):
        geodesic_point(path, 1.5)


def test_geodesic_midpoint(plus):
    path = GeodesicPath(plus, HALF)
    mid = geodesic_point(path, 0.5)
    assert np.trace(mid.mat).real == pytest.approx(1.0, abs=1e-15)
    root = 0.5 * (plus.mat + HALF / math.sqrt(0.5))
    np.testing.assert_allclose(sqrt_psd(mid).sqrt, root / np.linalg.norm(root), atol=1e-12)
    total, split = geodesic_triangle_check(path, 0.5)
    assert total == pytest.approx(math.pi / 4, abs=1e-10)
    assert split == pytest.approx(math.pi / 4, abs=1e-10)


def test_triangle_equality_on_geodesic(rng):
    path = GeodesicPath(random_density(2, rng), random_density(2, rng))
    total, split = geodesic_triangle_check(path, 0.0)
    assert total == split
    total, split = geodesic_triangle_check(path, 0.37)
    assert abs(total - split) <= 1e-10


def test_off_geodesic_point_is_strict(rng):
    a, b, c = (random_density(2, rng) for _ in range(3))
    assert angle(a, c) < angle(a, b) + angle(b, c)


@pytest.mark.parametrize("schedule", [None, lambda t, tau: (t / tau) ** 2, lambda t, tau: math.sin(0.5 * math.pi * t / tau)])
def test_geodesic_length_is_schedule_invariant(plus, schedule):
    kwargs = {} if schedule is None else {"schedule": schedule}
    path = GeodesicPath(qubit(0.4, 0.3), HALF, tau=1.0, **kwargs)
    tr = geodesic_trajectory(path, 4000)
    assert path_length(tr) == pytest.approx(angle(path.rho0, path.rho_tau), abs=1e-6)


def test_trace_profile_examples(plus):
    assert geodesic_trace_profile(plus, HALF, 0.0) == pytest.approx(1.0, abs=1e-12)
    assert geodesic_trace_profile(plus, HALF, 1.0) == pytest.approx(math.sqrt(2), abs=1e-12)
    mid = geodesic_trace_profile(plus, HALF, 0.5)
    assert 1.0 + 1e-3 < mid < math.sqrt(2)
    rho = qubit(0.3, 0.2)
    vals = [geodesic_trace_profile(rho, rho, p) for p in np.linspace(0, 1, 11)]
    assert max(vals) - min(vals) <= 1e-14


def test_trace_profile_closed_form(rng):
    for _ in range(20):
        a, b = random_density(2, rng), random_density(2, rng)
        for p in rng.uniform(size=5):
            assert geodesic_trace_profile(a, b, p) == pytest.approx(geodesic_trace_closed_form(a, b, p), abs=1e-10)


def test_saturation_equal_populations():
    rep = saturation_check(dephasing_run())
    assert rep.equal_diag_sqrt
    assert rep.fixed_closest_incoherent
    # the diagonal of sqrt(rho) itself moves as the state mixes
    assert not rep.static_diag_sqrt
    assert rep.max_diag_drift > 0.1


def test_saturation_unequal_populations():
    rep = saturation_check(dephasing_run(theta=math.pi / 3))
    assert not rep.equal_diag_sqrt


def test_saturation_damping(plus):
    tr = trajectory_from_analytic(plus, AmplitudeDamping(ConstantRate(2.0)), 0.5, 2000)
    rep = saturation_check(tr)
    assert not rep.equal_diag_sqrt
    assert not rep.fixed_closest_incoherent


def test_saturation_unitary_diagonal_static():
    from coherence_qsl.densmat import SIGMA_Z
    from coherence_qsl.dynamics import Unitary, integrate_master

    tr = integrate_master(qubit(0.3, 0.2), Unitary(0.5 * SIGMA_Z), 1.0, 500)
    rep = saturation_check(tr)
    assert rep.static_diag_sqrt and rep.fixed_closest_incoherent
    assert not rep.equal_diag_sqrt
