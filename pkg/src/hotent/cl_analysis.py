"""Cutoff-regulated bath noise power for a single Brownian oscillator.

For an oscillator with fundamental solution ``d2`` the power injected by the
bath force is::

    P(t) = (e^2/m) int_0^Lambda dk/(2 pi) (k/(4 pi)) coth(beta k/2) 2 Re R(k, t)
    R(k, t) = int_0^t d2'(u) e^{-i k u} du

With ``e^2 = 8 pi m gamma`` the prefactor is ``2 gamma / pi``.  ``R`` is a sum
of two exponential integrals and is evaluated in closed form, so only the
frequency integral is numerical.

Two oscillators are supported:

* damped   ``d2 = e^{-gamma t} sin(Omega t)/Omega``,  ``Omega^2 = omega_p^2 - gamma^2``
* inverted ``d2 = e^{-gamma t} sinh(Omega t)/Omega``, ``Omega^2 = omega_p^2 + gamma^2``

The white-noise (Caldeira--Leggett) value is ``2 gamma / beta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .quadrature import adaptive_gauss_legendre

__all__ = [
    "ClSetup",
    "cl_constant",
    "noise_power_exact",
    "noise_power_split_band",
    "noise_power_zero_point",
    "late_time_closed_form",
    "crossover_log_cutoff",
    "period_average",
    "oscillation_envelope",
    "envelope_growth_rate",
]


@dataclass(frozen=True)
class ClSetup:
    """Oscillator and bath parameters for the noise-power analysis."""

    gamma: float = 0.5
    omega_p: float = 1.0
    beta: float = 0.01
    omega_c: float = 50.0
    cutoff: float = 1000.0
    kind: str = "damped"
    m: float = 1.0

    def __post_init__(self):
        if self.kind not in ("damped", "inverted"):
            raise ValueError("kind must be 'damped' or 'inverted', got %r" % (self.kind,))
        if not (self.gamma >= 0 and self.omega_p > 0 and self.beta > 0 and self.m > 0):
            raise ValueError("need gamma >= 0 and positive omega_p, beta, m")
        if not 0 < self.omega_c < self.cutoff:
            raise ValueError("need 0 < omega_c < cutoff")
        if self.kind == "damped" and self.omega_p <= self.gamma:
            raise ValueError("damped case requires omega_p > gamma (underdamped)")

    @property
    def Omega(self) -> float:
        if self.kind == "damped":
            return math.sqrt(self.omega_p ** 2 - self.gamma ** 2)
        return math.sqrt(self.omega_p ** 2 + self.gamma ** 2)

    def exponents(self):
        """``(rate, coefficient)`` pairs with ``d2'(u) = sum c e^{rate u}``."""
        g, W = self.gamma, self.Omega
        if self.kind == "damped":
            return ((complex(-g, W), 0.5 * (1 + 1j * g / W)),
                    (complex(-g, -W), 0.5 * (1 - 1j * g / W)))
        return ((complex(W - g, 0.0), complex(0.5 * (1 - g / W))),
                (complex(-W - g, 0.0), complex(0.5 * (1 + g / W))))


def cl_constant(setup: ClSetup) -> float:
    """White-noise limit of the noise power, ``2 gamma / beta``."""
    return 2.0 * setup.gamma / setup.beta


def _phi1(z):
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < 1e-3
    zs = z[small]
    out[small] = 1.0 + zs / 2.0 + zs * zs / 6.0 + zs * zs * zs / 24.0
    zb = z[~small]
    out[~small] = np.expm1(zb) / zb
    return out


def response(setup: ClSetup, t: float, kappa) -> np.ndarray:
    """Closed-form ``R(k, t) = int_0^t d2'(u) e^{-i k u} du``."""
    k = np.asarray(kappa, dtype=float)
    out = np.zeros(k.shape, dtype=complex)
    for rate, c in setup.exponents():
        out += c * t * _phi1((rate - 1j * k) * t)
    return out


def _weight(setup: ClSetup, k, kind: str):
    """``k * coth(beta k/2)`` and its band approximations."""
    if kind == "exact":
        x = 0.5 * setup.beta * k
        safe = np.where(x > 20.0, 1.0, np.where(x == 0, 1.0, x))
        w = np.where(x > 20.0, k, k / np.tanh(safe))
        return np.where(x == 0, 2.0 / setup.beta, w)
    if kind == "thermal":
        return np.full_like(k, 2.0 / setup.beta)
    if kind == "vacuum":
        return k
    raise ValueError(kind)


def _power(setup: ClSetup, t: float, lo: float, hi: float, kind: str, tol: float,
           panel_scale: float = 1.0) -> float:
    if t <= 0:
        return 0.0

    def f(k):
        return _weight(setup, k, kind) * response(setup, t, k).real

    width = panel_scale * min(4.0 * math.pi / t, 5.0)
    brk = [b for b in (setup.Omega, setup.omega_c) if lo < b < hi]
    res = adaptive_gauss_legendre(f, lo, hi, breakpoints=brk, max_width=width, tol=tol)
    return float(res.value[0].real) * 2.0 * setup.gamma / math.pi


def _vectorise(fn, setup, t, *args):
    if np.ndim(t) == 0:
        return fn(setup, float(t), *args)
    return np.array([fn(setup, float(ti), *args) for ti in np.asarray(t, dtype=float)])


def noise_power_exact(setup: ClSetup, t, tol: float = 1e-8, panel_scale: float = 1.0):
    """Noise power with the full ``coth`` kernel on ``[0, Lambda]``."""
    return _vectorise(lambda s, ti: _power(s, ti, 0.0, s.cutoff, "exact", tol, panel_scale),
                      setup, t)


def noise_power_split_band(setup: ClSetup, t, tol: float = 1e-8):
    """Split-band approximation: ``(thermal, vacuum)`` parts.

    The low band ``[0, omega_c]`` uses ``coth -> 2/(beta k)``; the high band
    ``[omega_c, Lambda]`` uses ``coth -> 1``.
    """
    def both(s, ti):
        return (_power(s, ti, 0.0, s.omega_c, "thermal", tol),
                _power(s, ti, s.omega_c, s.cutoff, "vacuum", tol))
    if np.ndim(t) == 0:
        return both(setup, float(t))
    pairs = [both(setup, float(ti)) for ti in np.asarray(t, dtype=float)]
    return np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs])


def noise_power_zero_point(setup: ClSetup, t, tol: float = 1e-8):
    """Zero-point part of the exact kernel (``coth = 1 + 2 n_B``; the ``1``) on ``[0, Lambda]``."""
    return _vectorise(lambda s, ti: _power(s, ti, 0.0, s.cutoff, "vacuum", tol), setup, t)


def late_time_closed_form(setup: ClSetup):
    """Late-time ``(thermal, vacuum)`` split-band noise power of the damped oscillator.

    ``thermal = 2 gamma/(pi beta) [acot(gamma/(w_c - Omega)) + acot(gamma/(w_c + Omega))]
    - 2 gamma^2/(pi beta Omega) artanh(2 Omega w_c / (Omega^2 + gamma^2 + w_c^2))``

    ``vacuum = (gamma^2/pi) ln(D(Lambda)/D(w_c))`` with
    ``D(k) = (k^2 + gamma^2)^2 - 2 (k^2 - gamma^2) Omega^2 + Omega^4``.
    """
    if setup.kind != "damped":
        raise ValueError("closed form available for the damped oscillator only")
    g, W, b, wc = setup.gamma, setup.Omega, setup.beta, setup.omega_c

    def acot(x):
        return math.pi / 2.0 - math.atan(x)

    thermal = (2.0 * g / (math.pi * b) * (acot(g / (wc - W)) + acot(g / (wc + W)))
               - 2.0 * g * g / (math.pi * b * W)
               * math.atanh(2.0 * W * wc / (W * W + g * g + wc * wc)))
    vacuum = g * g / math.pi * (_log_D(setup, math.log(setup.cutoff)) - _log_D(setup, math.log(wc)))
    return thermal, vacuum


def _log_D(setup: ClSetup, log_k: float) -> float:
    """``ln D(k)`` evaluated from ``ln k`` (safe for astronomically large k)."""
    g, W = setup.gamma, setup.Omega
    if log_k > 100.0:
        # D = k^4 (1 + O(k^-2)); the correction underflows
        return 4.0 * log_k
    k2 = math.exp(2.0 * log_k)
    return math.log((k2 + g * g) ** 2 - 2.0 * (k2 - g * g) * W * W + W ** 4)


def crossover_log_cutoff(setup: ClSetup) -> float:
    """``ln Lambda`` at which the late-time vacuum part equals the thermal part.

    Solves ``(gamma^2/pi) ln(D(Lambda)/D(w_c)) = thermal`` by bisection in
    ``ln Lambda``.  For ``D ~ Lambda^4`` this gives
    ``Lambda ~ w_c exp(pi / (2 beta gamma))`` at leading order.
    """
    thermal, _ = late_time_closed_form(setup)
    g = setup.gamma
    target = thermal * math.pi / (g * g) + _log_D(setup, math.log(setup.omega_c))
    lo, hi = math.log(setup.omega_c), math.log(setup.omega_c) + 10.0
    while _log_D(setup, hi) < target:
        hi = lo + 2.0 * (hi - lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _log_D(setup, mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def period_average(fn, setup: ClSetup, t: float, n: int = 16) -> float:
    """Average ``fn(setup, t')`` over one cutoff ripple period ``2 pi / Lambda``."""
    ts = t + np.arange(n) * (2.0 * math.pi / setup.cutoff) / n
    return float(np.mean([fn(setup, float(x)) for x in ts]))


def oscillation_envelope(setup: ClSetup, centers: Sequence[float], n_sub: int = 40) -> np.ndarray:
    """Envelope of ``|P(t) - 2 gamma/beta|`` near each center time.

    The deviation oscillates at the cutoff frequency; the envelope is the
    maximum over ``n_sub`` samples spanning slightly more than one period
    ``2 pi / Lambda`` starting at each center.
    """
    base = cl_constant(setup)
    span = 1.05 * 2.0 * math.pi / setup.cutoff
    out = []
    for c in centers:
        ts = c + np.linspace(0.0, span, n_sub)
        out.append(max(abs(noise_power_exact(setup, float(x)) - base) for x in ts))
    return np.array(out)


def envelope_growth_rate(setup: ClSetup, t_lo: float, t_hi: float, n_windows: int = 9,
                         n_sub: int = 40) -> float:
    """Least-squares slope of ``ln envelope`` on ``[t_lo, t_hi]``."""
    centers = np.linspace(t_lo, t_hi, n_windows)
    env = oscillation_envelope(setup, centers, n_sub)
    return float(np.polyfit(centers, np.log(env), 1)[0])
