"""Two-mode squeezed thermal states in the oscillator and normal-mode bases."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import CovarianceMatrix

__all__ = [
    "SqueezeSpec",
    "tmst_covariance_canonical",
    "tmst_covariance_normal_modes",
    "tmst_pt_eigenvalues",
    "normal_mode_transform",
    "nbar_from_beta",
    "entanglement_threshold_eta",
]


@dataclass(frozen=True)
class SqueezeSpec:
    """Squeeze parameter ``zeta = eta exp(i theta)`` and thermal occupations."""

    eta: float = 0.0
    theta: float = 0.0
    nbar1: float = 0.0
    nbar2: float = 0.0

    def __post_init__(self):
        if not (self.eta >= 0 and math.isfinite(self.eta)):
            raise ValueError("eta must be non-negative, got %r" % (self.eta,))
        if not (0.0 <= self.theta < 2.0 * math.pi):
            raise ValueError("theta must lie in [0, 2 pi), got %r" % (self.theta,))
        for name in ("nbar1", "nbar2"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ValueError("%s must be non-negative, got %r" % (name, v))


def nbar_from_beta(beta: float, omega: float) -> float:
    """Thermal occupation ``1 / (exp(beta omega) - 1)``."""
    return 1.0 / math.expm1(beta * omega)


def tmst_covariance_canonical(spec: SqueezeSpec, m: float = 1.0, omega: float = 1.0) -> CovarianceMatrix:
    """Covariance of the two-mode squeezed thermal state, ``(x1, x2, p1, p2)`` order.

    Examples
    --------
    >>> c = tmst_covariance_canonical(SqueezeSpec(eta=2.0), 1.0, 1.0)
    >>> round(c["x1x2"] / (-math.sinh(4.0) / 2), 12)
    1.0
    """
    h1 = spec.nbar1 + 0.5
    h2 = spec.nbar2 + 0.5
    ch2 = math.cosh(spec.eta) ** 2
    sh2 = math.sinh(spec.eta) ** 2
    s2 = math.sinh(2.0 * spec.eta)
    ntot = spec.nbar1 + spec.nbar2 + 1.0
    c, s = math.cos(spec.theta), math.sin(spec.theta)
    a1 = h1 * ch2 + h2 * sh2
    a2 = h2 * ch2 + h1 * sh2
    mw = m * omega
    return CovarianceMatrix([
        a1 / mw,                    # x1x1
        a2 / mw,                    # x2x2
        -ntot * s2 * c / (2 * mw),  # x1x2
        0.0,                        # x1p1
        0.0,                        # x2p2
        -0.5 * ntot * s2 * s,       # x1p2
        -0.5 * ntot * s2 * s,       # x2p1
        mw * a1,                    # p1p1
        mw * a2,                    # p2p2
        0.5 * mw * ntot * s2 * c,   # p1p2
    ])


def normal_mode_transform() -> np.ndarray:
    """Orthogonal map from ``(x1, x2, p1, p2)`` to ``(x+, p+, x-, p-)``.

    ``x± = (x1 ± x2)/sqrt(2)`` and likewise for momenta; the map is symplectic
    as well as orthogonal.
    """
    r = 1.0 / math.sqrt(2.0)
    return np.array([[r, r, 0, 0],
                     [0, 0, r, r],
                     [r, -r, 0, 0],
                     [0, 0, r, -r]], dtype=float)


def tmst_covariance_normal_modes(spec: SqueezeSpec, m: float = 1.0, omega: float = 1.0) -> np.ndarray:
    """Block-diagonal covariance in the normal-mode basis ``(x+, p+, x-, p-)``.

    Requires ``nbar1 == nbar2``.  Returned as a plain 4x4 array because the
    ordering differs from :class:`~hotent.model.CovarianceMatrix`.
    """
    if spec.nbar1 != spec.nbar2:
        raise ValueError("normal-mode form requires nbar1 == nbar2")
    n = spec.nbar1
    c2, s2 = math.cosh(2 * spec.eta), math.sinh(2 * spec.eta)
    cph, sph = math.cos(spec.theta), math.sin(spec.theta)
    k = 2 * n + 1
    mw = m * omega
    out = np.zeros((4, 4))
    out[0, 0] = k * (c2 - cph * s2) / (2 * mw)
    out[1, 1] = 0.5 * mw * k * (c2 + cph * s2)
    out[0, 1] = out[1, 0] = -0.5 * k * sph * s2
    out[2, 2] = k * (c2 + cph * s2) / (2 * mw)
    out[3, 3] = 0.5 * mw * k * (c2 - cph * s2)
    out[2, 3] = out[3, 2] = 0.5 * k * sph * s2
    return out


def tmst_pt_eigenvalues(spec: SqueezeSpec):
    """Closed-form partially-transposed symplectic eigenvalues ``(lambda_>, lambda_<)``.

    Valid for symmetric occupations ``nbar1 == nbar2 == nbar``:
    ``lambda = exp(±2 eta) (nbar + 1/2)``.
    """
    if spec.nbar1 != spec.nbar2:
        raise ValueError("closed form requires nbar1 == nbar2")
    h = spec.nbar1 + 0.5
    return math.exp(2 * spec.eta) * h, math.exp(-2 * spec.eta) * h


def entanglement_threshold_eta(nbar: float) -> float:
    """Squeeze above which the symmetric state is entangled: ``ln(2 nbar + 1)/2``."""
    return 0.5 * math.log(2.0 * nbar + 1.0)
