"""Covariance evolution and the fundamental-solution propagator.

The covariance obeys the closed, deterministic moment equations of two
coupled Brownian oscillators with white (high-temperature) bath noise.
They are integrated with fixed-step fourth-order Runge--Kutta.  Alongside
the ten covariance entries the integrator carries the inverse covariance
``K = sigma^{-1}`` (a Riccati equation) and ``ln det sigma``::

    dK/dt          = -W^T K - K W - K N K
    d ln det / dt  = 2 tr W + tr(K N)

In the parametrically unstable regime the covariance becomes extremely
ill-conditioned (condition numbers beyond 1e16 after a few hundred time
units), so a determinant recomputed from the entries loses every digit,
while the tracked value stays accurate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .model import (CovarianceMatrix, DriveProtocol, SystemParams, drive_value,
                    kernel_parameters, pack, unpack)

__all__ = [
    "IntegrationError",
    "Trajectory",
    "PropagatorMatrix",
    "drift_matrix",
    "diffusion_matrix",
    "covariance_rhs",
    "evolve",
    "propagate_fundamental",
    "MIN_STEPS_PER_PERIOD",
    "OVERFLOW_GUARD",
]

MIN_STEPS_PER_PERIOD = 256
DEFAULT_STEPS_PER_PERIOD = 4096
DEFAULT_SAMPLES_PER_PERIOD = 16
OVERFLOW_GUARD = 1e150


class IntegrationError(RuntimeError):
    """Raised when the integrator produces non-finite values."""


def drift_matrix(params: SystemParams, protocol: DriveProtocol, t: float) -> np.ndarray:
    """First-moment drift matrix ``W(t)`` with ``d<Z>/dt = W(t) <Z>``.

    Both momenta are damped with ``-2 gamma_i``.
    """
    m, w2 = params.m, params.omega ** 2
    s = drive_value(protocol, t)
    return np.array([
        [0.0, 0.0, 1.0 / m, 0.0],
        [0.0, 0.0, 0.0, 1.0 / m],
        [-m * w2, -m * s, -2.0 * params.gamma1, 0.0],
        [-m * s, -m * w2, 0.0, -2.0 * params.gamma2],
    ])


def diffusion_matrix(params: SystemParams) -> np.ndarray:
    """Constant noise injection ``N = diag(0, 0, 4 m gamma_1/beta_1, 4 m gamma_2/beta_2)``."""
    n1, n2 = params.noise_injection()
    return np.diag([0.0, 0.0, n1, n2])


def covariance_rhs(sigma: CovarianceMatrix, t: float, params: SystemParams,
                   protocol: DriveProtocol) -> CovarianceMatrix:
    """Time derivative of the covariance at time ``t``.

    Evaluates the same compiled (or fallback) right-hand side that the
    integrator uses, so the tests exercise the production formulas.
    """
    y = np.zeros(21)
    y[:10] = sigma.packed
    dy = kernels.covariance_rhs(float(t), y, kernel_parameters(params, protocol))
    return CovarianceMatrix(dy[:10])


@dataclass
class Trajectory:
    """Sampled solution of the covariance equations.

    Attributes
    ----------
    times : ndarray, shape (n,)
    packed : ndarray, shape (n, 10)
        Packed covariance entries at each sample.
    log_det : ndarray, shape (n,)
        ``ln det sigma`` integrated alongside the covariance.
    inverse_packed : ndarray, shape (n, 10)
        Packed entries of ``sigma^{-1}``.
    terminated_early : bool
        True when the overflow guard stopped the run before ``t_end``.
    reason : str
        Human-readable termination reason (empty when the run completed).
    """

    times: np.ndarray
    packed: np.ndarray
    log_det: np.ndarray
    inverse_packed: np.ndarray
    params: SystemParams
    protocol: DriveProtocol
    dt: float
    t_end: float
    terminated_early: bool = False
    reason: str = ""
    backend: str = field(default=kernels.BACKEND)

    def __len__(self):
        return len(self.times)

    def covariance(self, i: int) -> CovarianceMatrix:
        return CovarianceMatrix(self.packed[i])

    @property
    def covariances(self):
        return [CovarianceMatrix(row) for row in self.packed]

    @property
    def matrices(self) -> np.ndarray:
        """Stack of full 4x4 covariance matrices, shape (n, 4, 4)."""
        return unpack(self.packed)

    def entry(self, name: str) -> np.ndarray:
        from .model import PACKED_NAMES
        return self.packed[:, PACKED_NAMES.index(name)]


def _step_plan(params, protocol, t_end, steps_per_period, sample_stride):
    if not t_end > 0:
        raise ValueError("t_end must be positive, got %r" % (t_end,))
    if steps_per_period < MIN_STEPS_PER_PERIOD:
        raise ValueError("steps_per_period must be >= %d, got %r"
                         % (MIN_STEPS_PER_PERIOD, steps_per_period))
    period = protocol.period(params.omega)
    dt = period / int(steps_per_period)
    n_steps = int(math.ceil(t_end / dt - 1e-9))
    if sample_stride is None:
        sample_stride = max(1, int(steps_per_period) // DEFAULT_SAMPLES_PER_PERIOD)
    if sample_stride < 1:
        raise ValueError("sample_stride must be >= 1")
    return dt, n_steps, int(sample_stride)


def evolve(initial: CovarianceMatrix, params: SystemParams, protocol: DriveProtocol,
           t_end: float, steps_per_period: int = DEFAULT_STEPS_PER_PERIOD,
           sample_stride: Optional[int] = None, guard: float = OVERFLOW_GUARD,
           backend: Optional[str] = None) -> Trajectory:
    """Integrate the covariance equations with fixed-step RK4.

    Parameters
    ----------
    initial : CovarianceMatrix
        Covariance at ``t = 0``; must be positive definite.
    params, protocol
        Physical parameters and the coupling drive.
    t_end : float
        Final time (rounded up to a whole number of steps).
    steps_per_period : int
        RK4 steps per drive period (per ``2 pi / omega`` when undriven).
    sample_stride : int, optional
        Record every ``sample_stride``-th step (default: 16 samples per period).
        The final step is always recorded.
    guard : float
        Stop when any covariance entry exceeds this magnitude.
    backend : {"compiled", "python"}, optional
        Override the kernel back end chosen at import.

    Returns
    -------
    Trajectory
    """
    dt, n_steps, stride = _step_plan(params, protocol, t_end, steps_per_period, sample_stride)
    mat = initial.matrix
    sign, logdet = np.linalg.slogdet(mat)
    if sign <= 0:
        raise ValueError("initial covariance must be positive definite")
    y0 = np.concatenate([initial.packed, pack(np.linalg.inv(mat)), [logdet]])
    impl = kernels.get_backend(backend)
    times, samples, n_done, status, _ = impl.integrate_covariance(
        y0, kernel_parameters(params, protocol), 0.0, dt, n_steps, stride, guard)
    if status == 2:
        raise IntegrationError("non-finite value after %d of %d steps (t = %.6g)"
                               % (n_done, n_steps, n_done * dt))
    terminated = status == 1
    reason = ""
    if terminated:
        reason = ("overflow guard: a covariance entry exceeded %.3g at t = %.6g"
                  % (guard, n_done * dt))
    name = "python" if impl is kernels.get_backend("python") else "compiled"
    return Trajectory(times=times, packed=samples[:, :10], log_det=samples[:, 20],
                      inverse_packed=samples[:, 10:20], params=params, protocol=protocol,
                      dt=dt, t_end=float(t_end), terminated_early=terminated,
                      reason=reason, backend=name)


@dataclass(frozen=True)
class PropagatorMatrix:
    """Fundamental matrix ``D(t)`` mapping ``<Z(t0)>`` to ``<Z(t)>``."""

    entries: np.ndarray
    t: float
    t0: float = 0.0

    def det(self) -> float:
        return float(np.linalg.det(self.entries))


def propagate_fundamental(params: SystemParams, protocol: DriveProtocol, t_end: float,
                          steps_per_period: int = DEFAULT_STEPS_PER_PERIOD,
                          t_start: float = 0.0, sample_stride: Optional[int] = None,
                          return_samples: bool = False, backend: Optional[str] = None):
    """Integrate ``dD/dt = W(t) D`` from ``D(t_start) = I`` over ``t_end - t_start``.

    Returns a :class:`PropagatorMatrix`, or ``(PropagatorMatrix, times,
    samples)`` with ``samples`` of shape ``(n, 4, 4)`` when
    ``return_samples`` is true.
    """
    duration = t_end - t_start
    dt, n_steps, stride = _step_plan(params, protocol, duration, steps_per_period,
                                     sample_stride if return_samples else None)
    if not return_samples:
        stride = n_steps
    impl = kernels.get_backend(backend)
    times, samples, n_done, status, last = impl.integrate_propagator(
        np.eye(4).ravel(), kernel_parameters(params, protocol), float(t_start), dt,
        n_steps, stride, OVERFLOW_GUARD)
    if status != 0:
        raise IntegrationError("propagator integration failed after %d steps (status %d)"
                               % (n_done, status))
    result = PropagatorMatrix(entries=last.reshape(4, 4), t=t_start + n_steps * dt,
                              t0=float(t_start))
    if return_samples:
        return result, times, samples.reshape(-1, 4, 4)
    return result
