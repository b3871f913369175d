"""Adaptive panel Gauss--Legendre quadrature for smooth oscillatory integrands.

The interval is cut at the supplied breakpoints and into panels no wider
than ``max_width`` (chosen by callers to cover a few oscillation periods).
Each panel is bisected until the 32-point rule on the panel and on its
two halves agree to the requested tolerance.  Integrands may be vector
valued: ``f(x)`` returns shape ``(npts,)`` or ``(k, npts)``, real or complex.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = ["QuadratureError", "QuadratureResult", "adaptive_gauss_legendre", "panel_edges"]

_NODES = {}


def _rule(n):
    if n not in _NODES:
        _NODES[n] = leggauss(n)
    return _NODES[n]


class QuadratureError(RuntimeError):
    """Panel refinement failed to meet the tolerance.

    Attributes
    ----------
    worst_panel : tuple
        ``(lo, hi, error_estimate)`` of the worst unresolved panel.
    """

    def __init__(self, message, worst_panel):
        super().__init__("%s; worst panel [%.10g, %.10g] error %.3g"
                         % (message, worst_panel[0], worst_panel[1], worst_panel[2]))
        self.worst_panel = worst_panel


@dataclass
class QuadratureResult:
    value: np.ndarray
    n_panels: int
    n_evals: int
    max_error: float


def panel_edges(a, b, breakpoints=(), max_width=None):
    """Sorted panel edges on ``[a, b]`` including interior breakpoints."""
    pts = [a] + sorted(p for p in breakpoints if a < p < b) + [b]
    edges = [a]
    for lo, hi in zip(pts[:-1], pts[1:]):
        n = 1 if not max_width else max(1, int(math.ceil((hi - lo) / max_width)))
        edges.extend(lo + (hi - lo) * np.arange(1, n + 1) / n)
    out = np.array(edges, dtype=float)
    out[-1] = b
    return out


def _apply(f, lo, hi, x, w):
    half = 0.5 * (hi - lo)
    pts = (0.5 * (hi + lo))[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(f(pts.ravel()))
    if vals.ndim == 1:
        vals = vals[None, :]
    vals = vals.reshape(vals.shape[0], lo.size, x.size)
    return np.einsum("kpn,n->kp", vals, w) * half[None, :]


def adaptive_gauss_legendre(f, a, b, breakpoints=(), max_width=None, tol=1e-8,
                            nodes=32, max_depth=40, max_panels=4_000_000):
    """Integrate ``f`` over ``[a, b]``.

    Parameters
    ----------
    f : callable
        Vectorised integrand; receives a 1-D array of abscissae.
    a, b : float
        Integration limits, ``a < b``.
    breakpoints : sequence of float
        Points where the integrand changes character (always panel edges).
    max_width : float, optional
        Upper bound on the initial panel width.
    tol : float
        Relative panel tolerance.  A panel is accepted when the one-panel and
        two-half-panel estimates differ by less than
        ``tol * max(|estimate|, density * width)``, where ``density`` is the
        mean absolute integrand level from the initial pass.
    nodes : int
        Gauss--Legendre nodes per panel.

    Notes
    -----
    The error estimate compares two quadrature levels, which can agree by
    coincidence for a jump inside a panel.  Integrands must be smooth between
    the supplied breakpoints; place discontinuities and kinks at breakpoints.

    Returns
    -------
    QuadratureResult
        ``value`` has shape ``(k,)`` (``k = 1`` for scalar integrands).

    Raises
    ------
    QuadratureError
        When refinement exceeds ``max_depth`` or ``max_panels``.
    """
    if not b > a:
        raise ValueError("need a < b")
    x, w = _rule(nodes)
    edges = panel_edges(a, b, breakpoints, max_width)
    lo, hi = edges[:-1], edges[1:]
    est = _apply(f, lo, hi, x, w)
    n_evals = lo.size * nodes
    density = float(np.sum(np.max(np.abs(est), axis=0))) / (b - a)
    total = np.zeros(est.shape[0], dtype=est.dtype)
    accepted = 0
    max_err = 0.0
    for depth in range(max_depth + 1):
        mid = 0.5 * (lo + hi)
        left = _apply(f, lo, mid, x, w)
        right = _apply(f, mid, hi, x, w)
        n_evals += 2 * lo.size * nodes
        both = left + right
        err = np.max(np.abs(est - both), axis=0)
        scale = np.maximum(np.max(np.abs(both), axis=0), density * (hi - lo))
        ok = err <= tol * scale
        if np.any(ok):
            total += np.sum(both[:, ok], axis=1)
            accepted += int(np.count_nonzero(ok))
            max_err = max(max_err, float(np.max(err[ok])))
        if np.all(ok):
            return QuadratureResult(total, accepted, n_evals, max_err)
        bad = ~ok
        if depth == max_depth or 2 * np.count_nonzero(bad) > max_panels:
            i = int(np.argmax(np.where(bad, err / np.where(scale > 0, scale, 1.0), -1.0)))
            raise QuadratureError("panel refinement limit reached", (float(lo[i]), float(hi[i]), float(err[i])))
        lo = np.concatenate([lo[bad], mid[bad]])
        hi = np.concatenate([mid[bad], hi[bad]])
        est = np.concatenate([left[:, bad], right[:, bad]], axis=1)
    raise AssertionError("unreachable")
