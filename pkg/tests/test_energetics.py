import math

import numpy as np
import pytest

from hotent.dynamics import evolve
from hotent.energetics import internal_energy, power_decomposition
from hotent.model import (CovarianceMatrix, DriveProtocol, SystemParams, ThermalProduct,
                          build_initial_covariance)

STABLE = (SystemParams(1, 1, 0.005, 0.005, 0.2, 0.2), DriveProtocol(0.0, 0.5, 1.5))
UNSTABLE = (SystemParams(1, 1, 0.0025, 0.0025, 0.2, 0.2), DriveProtocol(0.0, 0.5, 1.996))


def test_ground_state_energy():
    # zero-point energy omega/2 per oscillator
    params = SystemParams(1.0, 1.7)
    vac = build_initial_covariance(ThermalProduct(), params)
    assert internal_energy(vac, params, DriveProtocol(), 0.0) == pytest.approx(1.7)


def test_equipartition_at_white_noise_fixed_point():
    beta = 0.3
    params = SystemParams(2.0, 1.5, 0.04, 0.04, beta, beta)
    m, w = 2.0, 1.5
    fixed = CovarianceMatrix([1 / (m * w * w * beta)] * 2 + [0, 0, 0, 0, 0] + [m / beta] * 2 + [0])
    assert internal_energy(fixed, params, DriveProtocol(), 0.0) == pytest.approx(2 / beta)
    # a stationary point of the dynamics
    traj = evolve(fixed, params, DriveProtocol(), 30.0, 512)
    assert np.allclose(traj.packed[-1], fixed.packed, rtol=1e-12)


def test_coupling_energy_term():
    params = SystemParams(1.5, 1.0)
    c = CovarianceMatrix([1, 1, 0.3, 0, 0, 0, 0, 1, 1, 0])
    base = internal_energy(c, params, DriveProtocol(0.0, 0.0, 1.0), 0.0)
    coupled = internal_energy(c, params, DriveProtocol(0.2, 0.5, 1.0), 0.0)
    assert coupled - base == pytest.approx(1.5 * 0.7 * 0.3)


def test_channels_and_signs():
    params, protocol = STABLE
    traj = evolve(build_initial_covariance(ThermalProduct(2e4, 2e4), params), params, protocol, 50.0)
    b = power_decomposition(traj)
    assert np.all(b.P_xi1 == 2 * 0.005 / 0.2) and np.all(b.P_xi2 == 2 * 0.005 / 0.2)
    assert np.all(b.P_gamma1 <= 0) and np.all(b.P_gamma2 <= 0)
    assert np.all(b.P_xi1 > 0)
    recs = list(b.records())
    assert len(recs) == len(traj) and recs[3].U == b.U[3]
    assert b.table().shape == (len(traj), 8)


def test_no_drive_no_drive_power():
    params = SystemParams(1, 1, 0.01, 0.02, 0.5, 0.1)
    traj = evolve(build_initial_covariance(ThermalProduct(1.0, 2.0), params), params,
                  DriveProtocol(0.3, 0.0, 1.0), 20.0, 4096, sample_stride=1)
    b = power_decomposition(traj)
    assert np.all(b.P_drive == 0.0)
    assert b.relative_residual() < 1e-4


def test_energy_balance_on_stable_run():
    params, protocol = STABLE
    init = build_initial_covariance(ThermalProduct(2e4, 2e4), params)
    b = power_decomposition(evolve(init, params, protocol, 200.0, 4096, sample_stride=1))
    assert b.relative_residual() < 1e-4


def test_residual_refinement_is_second_order():
    params, protocol = STABLE
    init = build_initial_covariance(ThermalProduct(2e4, 2e4), params)

    def interior(stride):
        b = power_decomposition(evolve(init, params, protocol, 60.0, 4096, sample_stride=stride))
        return np.max(np.abs(b.residual[5:-5]))

    r8, r4, r2 = interior(8), interior(4), interior(2)
    assert 3.5 < r8 / r4 < 4.5
    assert 3.5 < r4 / r2 < 4.5


def test_dissipation_dwarfs_noise_on_unstable_run():
    params, protocol = UNSTABLE
    traj = evolve(build_initial_covariance(ThermalProduct(0.2, 0.2), params), params, protocol, 400.0)
    b = power_decomposition(traj)
    assert np.max(np.abs(b.P_gamma1) / b.P_xi1) > 1e3
    late = traj.times > 200
    assert np.mean(b.P_drive[late] > 0) > 0.5


def test_too_few_samples():
    params, protocol = STABLE
    traj = evolve(build_initial_covariance(ThermalProduct(), params), params, protocol,
                  0.01, 256, sample_stride=1000)
    assert len(traj) == 2
    with pytest.raises(ValueError):
        power_decomposition(traj)
