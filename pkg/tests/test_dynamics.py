import math

import numpy as np
import pytest
import scipy.integrate
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_physical_covariance
from hotent import kernels
from hotent.dynamics import (IntegrationError, covariance_rhs, diffusion_matrix, drift_matrix,
                             evolve, propagate_fundamental)
from hotent.model import (CovarianceMatrix, DriveProtocol, SystemParams, ThermalProduct,
                          build_initial_covariance, kernel_parameters, pack, unpack)

FIG2 = SystemParams(1.0, 1.0, 0.0025, 0.0025, 0.2, 0.2)
FIG2_DRIVE = DriveProtocol(0.0, 0.5, 1.996)


def oracle_drift(m, omega, g1, g2, s):
    """Drift written out from the Langevin equations, independent of the package."""
    return np.array([[0, 0, 1 / m, 0],
                     [0, 0, 0, 1 / m],
                     [-m * omega ** 2, -m * s, -2 * g1, 0],
                     [-m * s, -m * omega ** 2, 0, -2 * g2]], dtype=float)


def oracle_noise(m, g1, g2, b1, b2):
    return np.diag([0, 0, 4 * m * g1 / b1, 4 * m * g2 / b2])


def lyapunov_rhs(sigma, params, protocol, t):
    s = protocol.c0 + protocol.c1 * math.cos(protocol.omega_d * t)
    w = oracle_drift(params.m, params.omega, params.gamma1, params.gamma2, s)
    n = oracle_noise(params.m, params.gamma1, params.gamma2, params.beta_bath1, params.beta_bath2)
    return w @ sigma + sigma @ w.T + n, w, n


params_st = st.builds(SystemParams, st.floats(0.2, 5.0), st.floats(0.2, 5.0), st.floats(0.0, 0.5),
                      st.floats(0.0, 0.5), st.floats(0.01, 10.0), st.floats(0.01, 10.0))
drive_st = st.builds(DriveProtocol, st.floats(-1.0, 1.0), st.floats(-1.0, 1.0), st.floats(0.1, 4.0))


@settings(max_examples=300, deadline=None)
@given(params_st, drive_st, st.floats(0.0, 100.0), st.integers(0, 2 ** 32 - 1))
def test_rhs_matches_lyapunov_form(params, protocol, t, seed):
    sigma, _ = random_physical_covariance(np.random.default_rng(seed))
    ref, w, n = lyapunov_rhs(sigma, params, protocol, t)
    got = covariance_rhs(CovarianceMatrix(pack(sigma)), t, params, protocol).matrix
    assert np.max(np.abs(got - ref)) <= 1e-10 * max(1.0, np.max(np.abs(ref)))
    assert np.allclose(drift_matrix(params, protocol, t), w, rtol=1e-14, atol=1e-15)
    assert np.array_equal(diffusion_matrix(params), n)


@pytest.mark.parametrize("backend", ["python", "compiled"])
def test_riccati_and_logdet_rhs(backend, rng):
    impl = kernels.get_backend(backend)
    params, protocol, t = FIG2, FIG2_DRIVE, 1.234
    sigma, _ = random_physical_covariance(rng)
    k = np.linalg.inv(sigma)
    y = np.concatenate([pack(sigma), pack(k), [0.0]])
    dy = impl.covariance_rhs(t, y, kernel_parameters(params, protocol))
    _, w, n = lyapunov_rhs(sigma, params, protocol, t)
    dk = -w.T @ k - k @ w - k @ n @ k
    assert np.allclose(unpack(dy[10:20]), dk, rtol=1e-12, atol=1e-12 * np.max(np.abs(dk)))
    assert dy[20] == pytest.approx(2 * np.trace(w) + np.trace(k @ n), rel=1e-12)
    # and dK/dt is -K (d sigma/dt) K, the derivative of the inverse
    ds = unpack(dy[:10])
    assert np.allclose(unpack(dy[10:20]), -k @ ds @ k, rtol=1e-10, atol=1e-10 * np.max(np.abs(dk)))


def test_backends_agree(rng):
    init = build_initial_covariance(ThermalProduct(0.2, 0.2), FIG2)
    a = evolve(init, FIG2, FIG2_DRIVE, 30.0, 512, backend="python")
    b = evolve(init, FIG2, FIG2_DRIVE, 30.0, 512, backend="compiled")
    assert a.backend == "python" and b.backend == "compiled"
    assert np.array_equal(a.times, b.times)
    assert np.allclose(a.packed, b.packed, rtol=1e-12, atol=0)
    assert np.allclose(a.log_det, b.log_det, rtol=1e-12, atol=1e-12)
    pa = propagate_fundamental(FIG2, FIG2_DRIVE, 10.0, 512, backend="python").entries
    pb = propagate_fundamental(FIG2, FIG2_DRIVE, 10.0, 512, backend="compiled").entries
    assert np.allclose(pa, pb, rtol=1e-12, atol=1e-14)


def test_matches_adaptive_reference_solver():
    """Independent DOP853 integration of the Lyapunov ODE."""
    init = build_initial_covariance(ThermalProduct(0.2, 2e4), FIG2)

    def f(t, y):
        return lyapunov_rhs(y.reshape(4, 4), FIG2, FIG2_DRIVE, t)[0].ravel()

    t_end = 40.0
    ref = scipy.integrate.solve_ivp(f, (0, t_end), init.matrix.ravel(), method="DOP853",
                                    rtol=1e-12, atol=1e-12, dense_output=True)
    traj = evolve(init, FIG2, FIG2_DRIVE, t_end, 4096)
    expected = np.array([pack(ref.sol(t).reshape(4, 4)) for t in traj.times])
    err = np.max(np.abs(traj.packed - expected) / np.maximum(np.abs(expected), 1.0))
    assert err < 1e-8


def test_stationary_state_is_fixed_point():
    params = SystemParams(1.0, 1.3, 0.05, 0.08, 0.7, 2.0)
    protocol = DriveProtocol(0.3, 0.0, 1.0)
    w = oracle_drift(1.0, 1.3, 0.05, 0.08, 0.3)
    n = oracle_noise(1.0, 0.05, 0.08, 0.7, 2.0)
    stat = scipy.linalg.solve_continuous_lyapunov(w, -n)
    s0 = CovarianceMatrix.from_matrix(0.5 * (stat + stat.T))
    rhs = covariance_rhs(s0, 0.0, params, protocol).matrix
    assert np.max(np.abs(rhs)) < 1e-12
    traj = evolve(s0, params, protocol, 50.0, 1024)
    assert np.allclose(traj.packed[-1], s0.packed, rtol=1e-10, atol=1e-12)
    # relaxation from a hot product state reaches the same point
    far = evolve(build_initial_covariance(ThermalProduct(0.05, 0.05), params), params, protocol,
                 600.0, 512)
    assert np.allclose(far.packed[-1], s0.packed, rtol=1e-6, atol=1e-8)


def test_free_oscillator_is_a_rotation():
    params = SystemParams(2.0, 1.5)
    protocol = DriveProtocol()
    init = CovarianceMatrix([1.0, 0.3, 0.1, 0.2, -0.05, 0.0, 0.04, 0.8, 0.6, 0.02])
    t = 7.3
    traj = evolve(init, params, protocol, t, 4096, sample_stride=1)
    c, s = math.cos(1.5 * traj.times[-1]), math.sin(1.5 * traj.times[-1])
    mw = 2.0 * 1.5
    r = np.array([[c, 0, s / mw, 0], [0, c, 0, s / mw], [-mw * s, 0, c, 0], [0, -mw * s, 0, c]])
    expected = r @ init.matrix @ r.T
    # RK4 truncation at dt ~ 1e-3 over ~2 periods is ~2e-11
    assert np.allclose(traj.matrices[-1], expected, rtol=0, atol=1e-10)


@pytest.mark.parametrize("params,protocol", [
    (FIG2, FIG2_DRIVE),
    (SystemParams(1.0, 1.0, 0.01, 0.03, 1.0, 1.0), DriveProtocol(0.2, 0.5, 1.5)),
])
def test_liouville_determinant_law(params, protocol):
    for t in (3.0, 17.0, 60.0):
        d = propagate_fundamental(params, protocol, t, 2048)
        expected = -2.0 * (params.gamma1 + params.gamma2) * d.t
        assert math.log(d.det()) == pytest.approx(expected, abs=1e-9)


def test_covariance_determinant_tracking():
    # restricted to t <= 20 (cond sigma < 5e3); later the LU reference itself
    # degrades with the condition number while the tracked values do not
    init = build_initial_covariance(ThermalProduct(0.2, 0.2), FIG2)
    traj = evolve(init, FIG2, FIG2_DRIVE, 20.0)
    lu = np.linalg.slogdet(traj.matrices)[1]
    assert np.max(np.abs(traj.log_det - lu)) < 1e-9
    inv = np.linalg.inv(traj.matrices)
    scale = np.max(np.abs(inv), axis=(1, 2))[:, None, None]
    assert np.max(np.abs(unpack(traj.inverse_packed) - inv) / scale) < 1e-9
    # tracked inverse stays an inverse: K sigma = I
    prod = unpack(traj.inverse_packed) @ traj.matrices
    assert np.allclose(prod, np.eye(4), atol=1e-8)


def test_closed_system_log_det_constant():
    params = SystemParams(1.0, 1.0, 0.0, 0.0, 0.2, 0.2)
    init = build_initial_covariance(ThermalProduct(2e4, 2e4), params)
    traj = evolve(init, params, DriveProtocol(0.0, 0.5, 1.5), 400.0)
    assert np.max(np.abs(traj.log_det - traj.log_det[0])) == 0.0
    lu = np.linalg.slogdet(traj.matrices)[1]
    assert np.max(np.abs(lu - lu[0])) < 1e-6


def test_floquet_periodicity():
    tau = FIG2_DRIVE.tau_d
    one = propagate_fundamental(FIG2, FIG2_DRIVE, tau, 2048).entries
    two = propagate_fundamental(FIG2, FIG2_DRIVE, 2 * tau, 2048).entries
    assert np.allclose(two, one @ one, rtol=1e-10, atol=1e-12)
    # starting one period later gives the same one-period map
    shifted = propagate_fundamental(FIG2, FIG2_DRIVE, 2 * tau, 2048, t_start=tau).entries
    assert np.allclose(shifted, one, rtol=1e-10, atol=1e-12)


def test_rk4_fourth_order_convergence():
    init = build_initial_covariance(ThermalProduct(0.2, 0.2), FIG2)
    t = 10 * FIG2_DRIVE.tau_d
    ref = evolve(init, FIG2, FIG2_DRIVE, t, 16384).packed[-1]
    e1 = np.max(np.abs(evolve(init, FIG2, FIG2_DRIVE, t, 256).packed[-1] - ref))
    e2 = np.max(np.abs(evolve(init, FIG2, FIG2_DRIVE, t, 512).packed[-1] - ref))
    assert 12.0 <= e1 / e2 <= 20.0


def test_swap_covariance():
    params = SystemParams(1.0, 1.0, 0.01, 0.004, 0.3, 1.5)
    init = build_initial_covariance(ThermalProduct(0.5, 3.0), params)
    a = evolve(init, params, FIG2_DRIVE, 20.0, 512)
    b = evolve(init.swapped(), params.swapped(), FIG2_DRIVE, 20.0, 512)
    for i in (0, len(a) // 2, len(a) - 1):
        assert np.allclose(a.covariance(i).swapped().packed, b.packed[i], rtol=1e-12, atol=1e-15)


def test_sampling_layout():
    init = build_initial_covariance(ThermalProduct(), FIG2)
    traj = evolve(init, FIG2, FIG2_DRIVE, 5.0, 256, sample_stride=10)
    n_steps = math.ceil(5.0 / traj.dt - 1e-9)
    assert traj.times[0] == 0.0
    assert traj.times[-1] == pytest.approx(n_steps * traj.dt)
    assert np.allclose(np.diff(traj.times[:-1]), 10 * traj.dt)
    assert len(traj) == len(traj.packed) == len(traj.log_det)
    assert np.array_equal(traj.entry("x1x1"), traj.packed[:, 0])
    assert not traj.terminated_early and traj.reason == ""


def test_overflow_guard_terminates_cleanly():
    init = build_initial_covariance(ThermalProduct(0.2, 0.2), FIG2)
    traj = evolve(init, FIG2, FIG2_DRIVE, 400.0, 512, guard=1e6)
    assert traj.terminated_early and "overflow guard" in traj.reason
    assert traj.times[-1] < 400.0
    assert np.all(np.isfinite(traj.packed))


def test_input_validation():
    init = build_initial_covariance(ThermalProduct(), FIG2)
    with pytest.raises(ValueError):
        evolve(init, FIG2, FIG2_DRIVE, 1.0, 100)
    with pytest.raises(ValueError):
        evolve(init, FIG2, FIG2_DRIVE, 0.0)
    with pytest.raises(ValueError):
        evolve(CovarianceMatrix(-np.ones(10)), FIG2, FIG2_DRIVE, 1.0)
    with pytest.raises(ValueError):
        evolve(init, FIG2, FIG2_DRIVE, 1.0, 256, sample_stride=0)
    assert issubclass(IntegrationError, RuntimeError)
