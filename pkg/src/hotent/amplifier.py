"""Two coupled amplifying (anti-damped) oscillators with a constant coupling.

Each normal mode ``x± = (x1 ± x2)/sqrt(2)`` obeys::

    x'' - 2 g x' + omega_±^2 x = (e/m) xi_±(t),     omega_±^2 = omega^2 ± sigma

with independent bath forces of the same spectrum.  With
``Omega_±^2 = omega_±^2 - g^2 > 0`` the fundamental solutions are::

    d1(t) = e^{g t} [cos(Omega t) - (g/Omega) sin(Omega t)]
    d2(t) = e^{g t} sin(Omega t) / Omega

Second moments are propagated with the squared fundamental solutions.
The bath contribution is evaluated in the frequency domain::

    sigma_xx^noise(t) = (e^2/m^2) int_0^Lambda dk/(2 pi) (k/(4 pi)) coth(beta k/2) 2 |G(t,k)|^2

with ``G(t,k) = int_0^t d2(u) e^{i k u} du`` in closed form (and ``Gdot``
built from ``d2'`` for the momentum moments).  The factor 2 comes from the
symmetrised kernel ``<{xi(s), xi(s')}>/2`` containing ``2 cos k (s - s')``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .entanglement import effective_arrays, spectrum_arrays
from .quadrature import adaptive_gauss_legendre
from .squeezed import SqueezeSpec, tmst_covariance_normal_modes

__all__ = [
    "AmplifierParams",
    "AmplifierTrajectory",
    "EffectiveHistory",
    "fundamental_solutions",
    "homogeneous_block",
    "noise_response",
    "evolve_amplifier_covariance",
    "normal_to_canonical",
    "amplifier_effective_history",
]


@dataclass(frozen=True)
class AmplifierParams:
    """Parameters of the amplifying-oscillator pair.

    ``c0`` is the constant coupling ``sigma``; ``gamma`` fixes the bath
    coupling ``e^2 = 8 pi m gamma``; ``beta`` is the bath inverse temperature
    and ``cutoff`` the bath frequency cutoff.
    """

    m: float = 1.0
    omega: float = 1.0
    g: float = 0.02
    c0: float = 0.2
    gamma: float = 0.02
    beta: float = 0.1
    cutoff: float = 1000.0

    def __post_init__(self):
        if not (self.m > 0 and self.omega > 0):
            raise ValueError("m and omega must be positive")
        if not self.g >= 0:
            raise ValueError("amplification g must be non-negative")
        if not self.gamma >= 0:
            raise ValueError("gamma must be non-negative")
        if not (self.beta > 0 and self.cutoff > 0):
            raise ValueError("beta and cutoff must be positive")
        for s in (+1, -1):
            if self.mode_Omega_sq(s) <= 0:
                raise ValueError("Omega_%s^2 = omega^2 - g^2 %s sigma must be positive"
                                 % ("+" if s > 0 else "-", "+" if s > 0 else "-"))

    def mode_omega_sq(self, sign: int) -> float:
        return self.omega ** 2 + sign * self.c0

    def mode_Omega_sq(self, sign: int) -> float:
        return self.mode_omega_sq(sign) - self.g ** 2

    def mode_Omega(self, sign: int) -> float:
        return math.sqrt(self.mode_Omega_sq(sign))

    @property
    def e_squared(self) -> float:
        return 8.0 * math.pi * self.m * self.gamma


def fundamental_solutions(params: AmplifierParams, t, sign: int = +1):
    """``(d1, d2, d1', d2')`` of mode ``sign`` at times ``t``.

    ``d1(0) = 1, d1'(0) = 0, d2(0) = 0, d2'(0) = 1``.
    """
    t = np.asarray(t, dtype=float)
    g = params.g
    W = params.mode_Omega(sign)
    eg = np.exp(g * t)
    c, s = np.cos(W * t), np.sin(W * t)
    d2 = eg * s / W
    d1 = eg * (c - (g / W) * s)
    d2dot = eg * (g * s / W + c)
    d1dot = -params.mode_omega_sq(sign) * d2
    return d1, d2, d1dot, d2dot


def homogeneous_block(params: AmplifierParams, block0, t, sign: int = +1) -> np.ndarray:
    """Propagate one mode's 2x2 covariance ``[[xx, xp], [xp, pp]]`` without noise.

    Uses ``x(t) = d1 x0 + d2 p0/m`` and ``p(t) = m d1' x0 + d2' p0``.
    Returns an array of shape ``t.shape + (3,)`` with ``(xx, xp, pp)``.
    """
    m = params.m
    b = np.asarray(block0, dtype=float)
    sxx, sxp, spp = b[0, 0], b[0, 1], b[1, 1]
    d1, d2, d1d, d2d = fundamental_solutions(params, t, sign)
    xx = d1 * d1 * sxx + 2.0 * d1 * d2 * sxp / m + d2 * d2 * spp / (m * m)
    xp = m * d1 * d1d * sxx + (d1 * d2d + d2 * d1d) * sxp + d2 * d2d * spp / m
    pp = m * m * d1d * d1d * sxx + 2.0 * m * d1d * d2d * sxp + d2d * d2d * spp
    return np.stack([xx, xp, pp], axis=-1)


def _phi1(z):
    """``(exp(z) - 1)/z`` evaluated without cancellation near ``z = 0``."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < 1e-3
    zs = z[small]
    out[small] = 1.0 + zs / 2.0 + zs * zs / 6.0 + zs * zs * zs / 24.0
    zb = z[~small]
    out[~small] = np.expm1(zb) / zb
    return out


def _G_and_Gdot(params: AmplifierParams, t: float, kappa, sign: int):
    """Closed-form ``G = int_0^t d2(u) e^{i k u} du`` and the ``d2'`` analogue."""
    W = params.mode_Omega(sign)
    a = params.g + 1j * W
    b = params.g - 1j * W
    k = np.asarray(kappa, dtype=float)
    Ia = t * _phi1((a + 1j * k) * t)
    Ib = t * _phi1((b + 1j * k) * t)
    G = (Ia - Ib) / (2j * W)
    Gd = (a * Ia - b * Ib) / (2j * W)
    return G, Gd


def _spectral_weight(params: AmplifierParams, kappa, kernel: str):
    """``(k / 4 pi) * coth(beta k / 2) * 2 / (2 pi)`` (or its classical limit)."""
    k = np.asarray(kappa, dtype=float)
    if kernel == "quantum":
        x = 0.5 * params.beta * k
        coth = np.where(x > 20.0, 1.0, 1.0 / np.tanh(np.where(x > 20.0, 1.0, x)))
        w = k * coth
    elif kernel == "classical":
        w = np.full_like(k, 2.0 / params.beta)
    elif kernel == "vacuum":
        w = k
    else:
        raise ValueError("unknown kernel %r" % (kernel,))
    return w / (4.0 * math.pi) * 2.0 / (2.0 * math.pi)


def noise_response(params: AmplifierParams, t: float, kernel: str = "quantum",
                   tol: float = 1e-8, panel_scale: float = 1.0):
    """Bath-induced ``(xx, xp, pp)`` for both modes at time ``t``.

    Returns an array of shape ``(2, 3)``: rows are the ``+`` and ``-`` modes.

    Parameters
    ----------
    kernel : {"quantum", "classical", "vacuum"}
        ``quantum`` uses ``coth(beta k/2)``; ``classical`` its high-temperature
        form ``2/(beta k)``; ``vacuum`` the zero-point part only.
    panel_scale : float
        Multiplies the initial panel width (the convergence tests use 0.5).
    """
    if t <= 0 or params.gamma == 0:
        return np.zeros((2, 3))
    m = params.m
    e2 = params.e_squared

    def integrand(k):
        wgt = _spectral_weight(params, k, kernel)
        rows = []
        for sign in (+1, -1):
            G, Gd = _G_and_Gdot(params, t, k, sign)
            rows.append(wgt * (G.real ** 2 + G.imag ** 2) * e2 / (m * m))
            rows.append(wgt * (G * np.conj(Gd)).real * e2 / m)
            rows.append(wgt * (Gd.real ** 2 + Gd.imag ** 2) * e2)
        return np.array(rows)

    width = panel_scale * min(4.0 * math.pi / t, 5.0)
    brk = (params.mode_Omega(+1), params.mode_Omega(-1))
    res = adaptive_gauss_legendre(integrand, 0.0, params.cutoff, breakpoints=brk,
                                  max_width=width, tol=tol)
    return res.value.real.reshape(2, 3)


def normal_to_canonical(plus, minus) -> np.ndarray:
    """Packed canonical covariances from mode blocks ``(xx, xp, pp)``.

    ``x1 = (x+ + x-)/sqrt(2)``, ``x2 = (x+ - x-)/sqrt(2)`` (same for momenta);
    cross-mode correlations are zero.
    """
    P = np.asarray(plus, dtype=float)
    M = np.asarray(minus, dtype=float)
    sxx, sxp, spp = 0.5 * (P + M).T
    dxx, dxp, dpp = 0.5 * (P - M).T
    return np.stack([sxx, sxx, dxx, sxp, sxp, dxp, dxp, spp, spp, dpp], axis=-1)


@dataclass
class AmplifierTrajectory:
    """Normal-mode covariance history.

    ``plus`` and ``minus`` have shape ``(n, 3)`` with columns
    ``(xx, xp, pp)``; ``canonical`` holds packed ``(x1, x2, p1, p2)``
    covariances.
    """

    times: np.ndarray
    plus: np.ndarray
    minus: np.ndarray
    params: AmplifierParams
    kernel: str = "quantum"
    canonical: np.ndarray = field(init=False)

    def __post_init__(self):
        self.canonical = normal_to_canonical(self.plus, self.minus)


def evolve_amplifier_covariance(params: AmplifierParams, initial: SqueezeSpec,
                                times: Sequence[float], kernel: str = "quantum",
                                tol: float = 1e-8, include_noise: bool = True,
                                panel_scale: float = 1.0) -> AmplifierTrajectory:
    """Covariance of the amplifier pair on a time grid.

    The initial state is the two-mode squeezed thermal state ``initial``
    (with ``nbar1 == nbar2``), which is block diagonal in the normal modes.

    Raises
    ------
    hotent.quadrature.QuadratureError
        If the frequency integral does not converge.
    """
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or np.any(np.diff(t) <= 0) or np.any(t < 0):
        raise ValueError("times must be a non-negative increasing 1-D grid")
    nm = tmst_covariance_normal_modes(initial, params.m, params.omega)
    plus = homogeneous_block(params, nm[0:2, 0:2], t, +1)
    minus = homogeneous_block(params, nm[2:4, 2:4], t, -1)
    if include_noise:
        for i, ti in enumerate(t):
            nr = noise_response(params, float(ti), kernel, tol, panel_scale)
            plus[i] += nr[0]
            minus[i] += nr[1]
    return AmplifierTrajectory(t, plus, minus, params, kernel if include_noise else "none")


@dataclass
class EffectiveHistory:
    """Effective squeeze/temperature along an amplifier trajectory."""

    times: np.ndarray
    eta_eff: np.ndarray
    nbar_eff: np.ndarray
    beta_eff: np.ndarray
    lambda_small_sq: np.ndarray
    lambda_big_sq: np.ndarray
    E_N: np.ndarray
    bath_temperature: float

    @property
    def T_eff(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.where(np.isinf(self.beta_eff), 0.0, 1.0 / self.beta_eff)

    def _first_crossing(self, y, level) -> Optional[float]:
        above = y > level
        idx = np.flatnonzero(above[1:] & ~above[:-1])
        if idx.size == 0:
            return None
        i = int(idx[0])
        t0, t1, y0, y1 = self.times[i], self.times[i + 1], y[i], y[i + 1]
        return float(t0 + (level - y0) * (t1 - t0) / (y1 - y0))

    @property
    def temperature_crossing_time(self) -> Optional[float]:
        """First time ``T_eff`` rises above the bath temperature (interpolated)."""
        return self._first_crossing(self.T_eff, self.bath_temperature)

    @property
    def separability_time(self) -> Optional[float]:
        """First time ``lambda_<^2`` rises above 1/4 (interpolated)."""
        return self._first_crossing(self.lambda_small_sq, 0.25)


def amplifier_effective_history(trajectory: AmplifierTrajectory) -> EffectiveHistory:
    """Effective parameters of the oscillator-1 | oscillator-2 partition.

    The normal-mode covariance is rotated back to the canonical basis before
    partial transposition, so the partition is between the two oscillators.
    """
    r = spectrum_arrays(trajectory.canonical)
    eta, nbar, beta = effective_arrays(r["log_lambda_big_sq"], r["log_lambda_small_sq"],
                                       trajectory.params.omega)
    return EffectiveHistory(trajectory.times, eta, nbar, beta,
                            np.exp(r["log_lambda_small_sq"]), np.exp(r["log_lambda_big_sq"]),
                            r["E_N"], 1.0 / trajectory.params.beta)
