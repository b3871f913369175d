"""Physical parameters, drive protocol, covariance container and initial states.

Conventions used throughout the package:

* hbar = k_B = 1; times in units of 1/omega when omega = 1.
* Phase-space ordering ``Z = (x1, x2, p1, p2)``.
* A covariance matrix stores the symmetrised second moments
  ``sigma_ab = <{Z_a, Z_b}> / 2`` of a zero-mean Gaussian state.
* Only the ten independent entries are stored, in the packed order
  ``(x1x1, x2x2, x1x2, x1p1, x2p2, x1p2, x2p1, p1p1, p2p2, p1p2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "PACKED_NAMES",
    "PACKED_PAIRS",
    "SystemParams",
    "DriveProtocol",
    "CovarianceMatrix",
    "ThermalProduct",
    "TwoModeSqueezedThermal",
    "build_initial_covariance",
    "drive_value",
    "drive_rate",
    "kernel_parameters",
]

#: packed entry names, in storage order
PACKED_NAMES = ("x1x1", "x2x2", "x1x2", "x1p1", "x2p2",
                "x1p2", "x2p1", "p1p1", "p2p2", "p1p2")
#: (row, column) of each packed entry in the 4x4 matrix
PACKED_PAIRS = ((0, 0), (1, 1), (0, 1), (0, 2), (1, 3),
                (0, 3), (1, 2), (2, 2), (3, 3), (2, 3))

_ROWS = np.array([p[0] for p in PACKED_PAIRS])
_COLS = np.array([p[1] for p in PACKED_PAIRS])


def pack(matrix) -> np.ndarray:
    """Return the ten packed entries of a symmetric 4x4 matrix (upper triangle)."""
    a = np.asarray(matrix, dtype=float)
    if a.shape[-2:] != (4, 4):
        raise ValueError("expected a (..., 4, 4) array, got shape %s" % (a.shape,))
    return a[..., _ROWS, _COLS]


def unpack(packed) -> np.ndarray:
    """Build the symmetric 4x4 matrix (or a stack of them) from packed entries."""
    v = np.asarray(packed, dtype=float)
    if v.shape[-1] != 10:
        raise ValueError("expected 10 packed entries, got shape %s" % (v.shape,))
    out = np.empty(v.shape[:-1] + (4, 4))
    out[..., _ROWS, _COLS] = v
    out[..., _COLS, _ROWS] = v
    return out


@dataclass(frozen=True)
class SystemParams:
    """Physical configuration of the two oscillators and their private baths.

    Parameters
    ----------
    m : float
        Oscillator mass (both oscillators).
    omega : float
        Physical oscillator frequency.
    gamma1, gamma2 : float
        Damping constants, ``gamma_i = e_i**2 / (8 pi m)``.
    beta_bath1, beta_bath2 : float
        Inverse temperatures of the two baths.
    """

    m: float = 1.0
    omega: float = 1.0
    gamma1: float = 0.0
    gamma2: float = 0.0
    beta_bath1: float = 1.0
    beta_bath2: float = 1.0

    def __post_init__(self):
        if not (self.m > 0 and math.isfinite(self.m)):
            raise ValueError("mass m must be positive, got %r" % (self.m,))
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise ValueError("omega must be positive, got %r" % (self.omega,))
        for name in ("gamma1", "gamma2"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ValueError("%s must be non-negative, got %r" % (name, v))
        for name in ("beta_bath1", "beta_bath2"):
            v = getattr(self, name)
            if not v > 0:
                raise ValueError("%s must be positive, got %r" % (name, v))

    def noise_injection(self):
        """Return the constant momentum-noise injection rates ``4 m gamma_i / beta_i``."""
        return (4.0 * self.m * self.gamma1 / self.beta_bath1,
                4.0 * self.m * self.gamma2 / self.beta_bath2)

    def coupling_squared(self, which: int = 1) -> float:
        """Return ``e_i**2 = 8 pi m gamma_i`` for oscillator ``which``."""
        g = self.gamma1 if which == 1 else self.gamma2
        return 8.0 * math.pi * self.m * g

    def swapped(self) -> "SystemParams":
        """Return the parameters with the oscillator labels exchanged."""
        return SystemParams(self.m, self.omega, self.gamma2, self.gamma1,
                            self.beta_bath2, self.beta_bath1)


@dataclass(frozen=True)
class DriveProtocol:
    """Inter-oscillator coupling ``sigma(t) = c0 + c1 cos(omega_d t)``."""

    c0: float = 0.0
    c1: float = 0.0
    omega_d: float = 1.0

    def __post_init__(self):
        for name in ("c0", "c1", "omega_d"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError("%s must be finite" % name)
        if self.c1 != 0.0 and not self.omega_d > 0:
            raise ValueError("omega_d must be positive when c1 != 0")

    @property
    def tau_d(self) -> float:
        """Driving period ``2 pi / omega_d``."""
        return 2.0 * math.pi / self.omega_d

    @property
    def is_driven(self) -> bool:
        return self.c1 != 0.0

    def period(self, omega: float) -> float:
        """Reference period: the drive period when driven, else ``2 pi / omega``."""
        return self.tau_d if self.is_driven else 2.0 * math.pi / omega


def drive_value(protocol: DriveProtocol, t):
    """Evaluate the coupling ``c0 + c1 cos(omega_d t)`` (scalar or array ``t``)."""
    if np.ndim(t):
        return protocol.c0 + protocol.c1 * np.cos(protocol.omega_d * np.asarray(t, dtype=float))
    return protocol.c0 + protocol.c1 * math.cos(protocol.omega_d * t)


def drive_rate(protocol: DriveProtocol, t):
    """Analytic time derivative ``-c1 omega_d sin(omega_d t)`` of the coupling."""
    return -protocol.c1 * protocol.omega_d * np.sin(protocol.omega_d * np.asarray(t, dtype=float))


def kernel_parameters(params: SystemParams, protocol: DriveProtocol) -> np.ndarray:
    """Flatten parameters into the 9-vector consumed by :mod:`hotent.kernels`."""
    n1, n2 = params.noise_injection()
    return np.array([params.m, params.omega, params.gamma1, params.gamma2,
                     n1, n2, protocol.c0, protocol.c1, protocol.omega_d], dtype=float)


class CovarianceMatrix:
    """Symmetric 4x4 covariance of ``(x1, x2, p1, p2)``, stored as 10 entries.

    Instances are immutable: the packed array is flagged read-only.
    """

    __slots__ = ("_packed",)

    def __init__(self, packed):
        v = np.array(packed, dtype=float).reshape(10)
        v.setflags(write=False)
        self._packed = v

    @classmethod
    def from_matrix(cls, matrix, check_symmetric: bool = True, atol: float = 0.0):
        a = np.asarray(matrix, dtype=float)
        if a.shape != (4, 4):
            raise ValueError("covariance must be 4x4, got %s" % (a.shape,))
        if check_symmetric:
            scale = max(np.max(np.abs(a)), 1e-300)
            if np.max(np.abs(a - a.T)) > max(atol, 1e-12 * scale):
                raise ValueError("covariance matrix is not symmetric")
        return cls(pack(a))

    @property
    def packed(self) -> np.ndarray:
        return self._packed

    @property
    def matrix(self) -> np.ndarray:
        return unpack(self._packed)

    def __getitem__(self, name: str) -> float:
        return float(self._packed[PACKED_NAMES.index(name)])

    def __repr__(self):
        body = ", ".join("%s=%.6g" % (n, v) for n, v in zip(PACKED_NAMES, self._packed))
        return "CovarianceMatrix(%s)" % body

    def __eq__(self, other):
        if not isinstance(other, CovarianceMatrix):
            return NotImplemented
        return bool(np.array_equal(self._packed, other._packed))

    def __hash__(self):
        return hash(self._packed.tobytes())

    def swapped(self) -> "CovarianceMatrix":
        """Exchange the oscillator labels 1 <-> 2."""
        perm = [1, 0, 3, 2]
        a = self.matrix
        return CovarianceMatrix.from_matrix(a[np.ix_(perm, perm)])


@dataclass(frozen=True)
class ThermalProduct:
    """Product of two thermal states with inverse temperatures ``beta_osc1/2``.

    ``math.inf`` selects the ground state.
    """

    beta_osc1: float = math.inf
    beta_osc2: float = math.inf

    def __post_init__(self):
        for name in ("beta_osc1", "beta_osc2"):
            v = getattr(self, name)
            if not v > 0:
                raise ValueError("%s must be positive, got %r" % (name, v))


@dataclass(frozen=True)
class TwoModeSqueezedThermal:
    """Two-mode squeezed thermal state with squeeze ``eta * exp(i theta)``."""

    eta: float = 0.0
    theta: float = 0.0
    nbar1: float = 0.0
    nbar2: float = 0.0

    def __post_init__(self):
        if not self.eta >= 0:
            raise ValueError("eta must be non-negative, got %r" % (self.eta,))
        if not (0.0 <= self.theta < 2.0 * math.pi):
            raise ValueError("theta must lie in [0, 2 pi), got %r" % (self.theta,))
        for name in ("nbar1", "nbar2"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ValueError("%s must be non-negative, got %r" % (name, v))


InitialState = Union[ThermalProduct, TwoModeSqueezedThermal]


def half_coth(beta: float, omega: float) -> float:
    """Return ``coth(beta omega / 2) / 2 = nbar + 1/2`` (1/2 for ``beta = inf``)."""
    x = 0.5 * beta * omega
    if x > 20.0:
        # coth x = 1 + 2 e^{-2x} + ...; exact to double precision
        return 0.5 + math.exp(-2.0 * x)
    return 0.5 / math.tanh(x)


def build_initial_covariance(state: InitialState, params: SystemParams) -> CovarianceMatrix:
    """Covariance matrix of an initial Gaussian state.

    Parameters
    ----------
    state : ThermalProduct or TwoModeSqueezedThermal
    params : SystemParams
        Supplies ``m`` and ``omega``.

    Returns
    -------
    CovarianceMatrix
    """
    m, w = params.m, params.omega
    if isinstance(state, ThermalProduct):
        h1 = half_coth(state.beta_osc1, w)
        h2 = half_coth(state.beta_osc2, w)
        return CovarianceMatrix([h1 / (m * w), h2 / (m * w), 0.0, 0.0, 0.0,
                                 0.0, 0.0, m * w * h1, m * w * h2, 0.0])
    if isinstance(state, TwoModeSqueezedThermal):
        from .squeezed import SqueezeSpec, tmst_covariance_canonical
        spec = SqueezeSpec(state.eta, state.theta, state.nbar1, state.nbar2)
        return tmst_covariance_canonical(spec, m, w)
    raise TypeError("unsupported initial state %r" % (state,))
