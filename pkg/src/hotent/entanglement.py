"""Partial transpose, symplectic spectrum, logarithmic negativity.

For a two-mode covariance with 2x2 blocks ``A`` (oscillator 1), ``B``
(oscillator 2) and ``C`` (cross correlations) the partially transposed
symplectic eigenvalues follow from two invariants::

    Delta_pt = det A + det B - 2 det C
    lambda_{>,<}^2 = (Delta_pt ± sqrt(Delta_pt^2 - 4 det sigma)) / 2

Everything is evaluated in log-scaled form so that covariances with
entries up to ~1e150 never overflow; the smaller eigenvalue is obtained
as ``det sigma / lambda_>^2`` to avoid cancellation, and the discriminant
is formed from the blocks directly so that degenerate spectra stay exact.  ``ln det sigma`` may
be supplied by the caller (e.g. the value tracked by the integrator), which
matters for strongly ill-conditioned covariances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg4 import eigenvalues
from .model import CovarianceMatrix, unpack

__all__ = [
    "NonPhysicalCovarianceError",
    "SymplecticSpectrum",
    "EffectiveParams",
    "CriterionDiagnostics",
    "partial_transpose",
    "symplectic_spectrum",
    "log_negativity",
    "effective_params",
    "criterion_diagnostics",
    "spectrum_arrays",
    "effective_arrays",
    "symplectic_form",
    "symplectic_eigenvalues_direct",
    "LN4",
]

LN4 = math.log(4.0)
_LN2 = math.log(2.0)

# packed indices of the entries that pair p2 with another variable
_PT_FLIP = np.array([4, 5, 9])


class NonPhysicalCovarianceError(ValueError):
    """The input cannot be the covariance of a physical Gaussian state."""


def symplectic_form() -> np.ndarray:
    """``Sigma = [[0, I], [-I, 0]]`` for the ordering ``(x1, x2, p1, p2)``."""
    s = np.zeros((4, 4))
    s[0, 2] = s[1, 3] = 1.0
    s[2, 0] = s[3, 1] = -1.0
    return s


def partial_transpose(sigma: CovarianceMatrix) -> CovarianceMatrix:
    """Flip the sign of oscillator 2's momentum (an exact involution)."""
    v = sigma.packed.copy()
    v[_PT_FLIP] = -v[_PT_FLIP]
    return CovarianceMatrix(v)


def symplectic_eigenvalues_direct(matrix) -> np.ndarray:
    """Symplectic eigenvalues as moduli of the eigenvalues of ``i Sigma sigma``.

    Uses the characteristic-polynomial eigen solver of :mod:`hotent.linalg4`.
    Returns the two distinct values sorted ascending.
    """
    ev = eigenvalues(symplectic_form() @ np.asarray(matrix, dtype=float))
    mod = np.sort(np.abs(ev))
    return np.array([0.5 * (mod[0] + mod[1]), 0.5 * (mod[2] + mod[3])])


@dataclass(frozen=True)
class SymplecticSpectrum:
    """Partially transposed symplectic spectrum and the invariants behind it."""

    lambda_big: float
    lambda_small: float
    delta_pt: float
    log_det_sigma: float
    log_delta_pt: float

    @property
    def det_sigma(self) -> float:
        return math.exp(self.log_det_sigma)

    @property
    def log_negativity(self) -> float:
        return max(0.0, -math.log(2.0 * self.lambda_small))


_J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def _pt_discriminant(u, det_a, det_b, det_c):
    """``Delta_pt^2 - 4 det sigma`` of the partial transpose from the blocks.

    Uses the identity ``(det A - det B)^2 + 4 [det C' (det A + det B)
    + tr(A J C' J B' J C'^T J)]`` where the primes denote the partially
    transposed blocks (``p2`` sign-flipped).  It
    vanishes exactly for block-diagonal states with equal local spectra, where
    the difference form loses half the significant digits.
    """
    a = np.stack([np.stack([u[..., 0], u[..., 3]], -1), np.stack([u[..., 3], u[..., 7]], -1)], -2)
    b = np.stack([np.stack([u[..., 1], -u[..., 4]], -1), np.stack([-u[..., 4], u[..., 8]], -1)], -2)
    c = np.stack([np.stack([u[..., 2], -u[..., 5]], -1), np.stack([u[..., 6], -u[..., 9]], -1)], -2)
    j = _J2
    prod = a @ j @ c @ j @ b @ j @ np.swapaxes(c, -1, -2) @ j
    trace = prod[..., 0, 0] + prod[..., 1, 1]
    return (det_a - det_b) ** 2 + 4.0 * (-det_c * (det_a + det_b) + trace)


def spectrum_arrays(packed, log_det=None, check: bool = True):
    """Vectorised spectrum for a stack of packed covariances.

    Parameters
    ----------
    packed : array_like, shape (..., 10)
    log_det : array_like, optional
        ``ln det sigma``; computed from a scaled LU factorisation when omitted.
    check : bool
        Raise :class:`NonPhysicalCovarianceError` for unphysical inputs.

    Returns
    -------
    dict of ndarray
        Keys ``log_delta_pt``, ``log_det_sigma``, ``log_lambda_big_sq``,
        ``log_lambda_small_sq``, ``lambda_big``, ``lambda_small``, ``E_N``.
    """
    s = np.asarray(packed, dtype=float)
    scale = np.max(np.abs(s), axis=-1)
    if np.any(~np.isfinite(scale)) or np.any(scale <= 0):
        raise NonPhysicalCovarianceError("covariance entries must be finite and not all zero")
    u = s / scale[..., None]
    if check and np.any(u[..., [0, 1, 7, 8]] <= 0):
        raise NonPhysicalCovarianceError("covariance diagonal must be positive")
    det_a = u[..., 0] * u[..., 7] - u[..., 3] ** 2
    det_b = u[..., 1] * u[..., 8] - u[..., 4] ** 2
    det_c = u[..., 2] * u[..., 9] - u[..., 5] * u[..., 6]
    delta_u = det_a + det_b - 2.0 * det_c
    if check and np.any(delta_u <= 0):
        raise NonPhysicalCovarianceError("non-positive partially transposed invariant")
    log_scale = np.log(scale)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_delta = np.log(delta_u) + 2.0 * log_scale
    if log_det is None:
        sign, ld = np.linalg.slogdet(unpack(u))
        if check and np.any(sign <= 0):
            raise NonPhysicalCovarianceError("covariance is not positive definite")
        log_det = ld + 4.0 * log_scale
    else:
        log_det = np.asarray(log_det, dtype=float)
    disc = _pt_discriminant(u, det_a, det_b, det_c) / delta_u ** 2
    if check and np.any(disc < -1e-8):
        raise NonPhysicalCovarianceError(
            "Delta_pt^2 - 4 det sigma < 0 (min relative value %.3g)" % float(np.min(disc)))
    disc = np.clip(disc, 0.0, None)
    log_big_sq = log_delta + np.log(0.5 * (1.0 + np.sqrt(disc)))
    log_small_sq = log_det - log_big_sq
    e_n = np.maximum(0.0, -_LN2 - 0.5 * log_small_sq)
    return {
        "log_delta_pt": log_delta,
        "log_det_sigma": log_det,
        "log_lambda_big_sq": log_big_sq,
        "log_lambda_small_sq": log_small_sq,
        "lambda_big": np.exp(0.5 * log_big_sq),
        "lambda_small": np.exp(0.5 * log_small_sq),
        "E_N": e_n,
    }


def symplectic_spectrum(sigma: CovarianceMatrix, log_det: Optional[float] = None) -> SymplecticSpectrum:
    """Partially transposed symplectic spectrum of a two-mode covariance.

    Parameters
    ----------
    sigma : CovarianceMatrix
    log_det : float, optional
        Externally tracked ``ln det sigma`` (see :mod:`hotent.dynamics`).

    Raises
    ------
    NonPhysicalCovarianceError
        If ``Delta_pt^2 - 4 det sigma < -1e-8 Delta_pt^2``.
    """
    r = spectrum_arrays(sigma.packed, log_det)
    return SymplecticSpectrum(
        lambda_big=float(r["lambda_big"]),
        lambda_small=float(r["lambda_small"]),
        delta_pt=float(np.exp(r["log_delta_pt"])),
        log_det_sigma=float(r["log_det_sigma"]),
        log_delta_pt=float(r["log_delta_pt"]),
    )


def log_negativity(sigma: CovarianceMatrix, log_det: Optional[float] = None) -> float:
    """Logarithmic negativity ``max(0, -ln(2 lambda_<))`` (natural log)."""
    return float(spectrum_arrays(sigma.packed, log_det)["E_N"])


@dataclass(frozen=True)
class EffectiveParams:
    """Effective two-mode-squeezed-thermal description of a spectrum."""

    eta_eff: float
    nbar_eff: float
    beta_eff: float

    @property
    def temperature(self) -> float:
        return 0.0 if math.isinf(self.beta_eff) else 1.0 / self.beta_eff


def effective_arrays(log_big_sq, log_small_sq, omega: float, check: bool = True):
    """Vectorised effective squeeze, occupation and inverse temperature.

    ``nbar + 1/2 = sqrt(lambda_> lambda_<)``, ``eta = ln(lambda_>/lambda_<)/4``,
    ``beta = (2/omega) arcoth(2 nbar + 1) = ln(1 + 1/nbar)/omega``.
    """
    lb = np.asarray(log_big_sq, dtype=float)
    ls = np.asarray(log_small_sq, dtype=float)
    geo = np.exp(0.25 * (lb + ls))          # sqrt(lambda_> lambda_<)
    if check and np.any(geo < 0.5 - 1e-8):
        raise NonPhysicalCovarianceError("sqrt(lambda_> lambda_<) below 1/2")
    nbar = np.clip(geo - 0.5, 0.0, None)
    eta = 0.125 * (lb - ls)
    with np.errstate(divide="ignore"):
        beta = np.where(nbar > 0, np.log1p(1.0 / np.where(nbar > 0, nbar, 1.0)) / omega, np.inf)
    return eta, nbar, beta


def effective_params(spectrum: SymplecticSpectrum, omega: float) -> EffectiveParams:
    """Effective squeeze parameter and temperature of a PT spectrum.

    The ground state maps to ``nbar_eff = 0`` and ``beta_eff = +inf``.
    """
    eta, nbar, beta = effective_arrays(2.0 * math.log(spectrum.lambda_big),
                                       2.0 * math.log(spectrum.lambda_small), omega)
    return EffectiveParams(float(eta), float(nbar), float(beta))


@dataclass(frozen=True)
class CriterionDiagnostics:
    """Log-space entanglement-sustainability diagnostic."""

    log_delta_pt: float
    log_det_sigma: float
    gap: float
    sustaining: bool


def criterion_diagnostics(sigma: CovarianceMatrix, log_det: Optional[float] = None) -> CriterionDiagnostics:
    """``ln Delta_pt``, ``ln det sigma`` and their gap; flags ``gap > ln 4``.

    When ``Delta_pt^2 >> det sigma`` one has ``lambda_<^2 ≈ det sigma / Delta_pt``,
    so ``lambda_< < 1/2`` (entanglement) amounts to
    ``ln Delta_pt - ln det sigma > ln 4``.
    """
    r = spectrum_arrays(sigma.packed, log_det)
    gap = float(r["log_delta_pt"] - r["log_det_sigma"])
    return CriterionDiagnostics(float(r["log_delta_pt"]), float(r["log_det_sigma"]),
                                gap, gap > LN4)
