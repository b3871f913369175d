"""Small fixed-size linear algebra: characteristic polynomials and roots.

The eigenvalues of a real 4x4 matrix are obtained as the roots of its
characteristic polynomial.  Coefficients come from the Faddeev--LeVerrier
trace recursion; roots come from the Aberth--Ehrlich simultaneous Newton
iteration followed by one Newton polish step per root.  This keeps the
Floquet and symplectic computations free of a general eigensolver; a
general eigensolver is used only as an independent oracle in the tests.
"""
from __future__ import annotations

import cmath
import math

import numpy as np

__all__ = ["charpoly", "polyroots", "eigenvalues", "log_abs_det"]


def charpoly(a) -> np.ndarray:
    """Monic characteristic polynomial ``det(z I - A)`` via Faddeev--LeVerrier.

    Parameters
    ----------
    a : (n, n) array_like

    Returns
    -------
    ndarray of shape (n + 1,)
        Coefficients in descending powers, leading coefficient 1.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    coeffs = np.zeros(n + 1)
    coeffs[0] = 1.0
    m = np.zeros_like(a)
    eye = np.eye(n)
    for k in range(1, n + 1):
        m = a @ m + coeffs[k - 1] * eye
        coeffs[k] = -np.trace(a @ m) / k
    return coeffs


def _horner(c, z):
    p = c[0]
    dp = 0.0
    for ck in c[1:]:
        dp = dp * z + p
        p = p * z + ck
    return p, dp


def polyroots(coeffs, max_iter: int = 500, tol: float = 1e-15) -> np.ndarray:
    """All complex roots of a polynomial (descending coefficients).

    Aberth--Ehrlich iteration from points on a circle whose radius is the
    geometric-mean root magnitude, then one Newton polish per root.  Roots are
    returned sorted by decreasing modulus (ties broken by real then imaginary
    part) so that results are deterministic.
    """
    c = np.asarray(coeffs, dtype=complex)
    nz = np.flatnonzero(c)
    if nz.size == 0:
        raise ValueError("zero polynomial")
    c = c[nz[0]:]
    # strip zero roots
    n_zero = 0
    while c.size > 1 and c[-1] == 0:
        c = c[:-1]
        n_zero += 1
    c = c / c[0]
    n = c.size - 1
    roots = []
    if n >= 1:
        # initial radius: geometric mean of root moduli, bounded by Cauchy's bound
        cauchy = 1.0 + max(abs(v) for v in c[1:])
        radius = min(abs(c[-1]) ** (1.0 / n), cauchy)
        if radius == 0.0:
            radius = 1.0
        z = [radius * cmath.exp(1j * (2.0 * math.pi * k / n + 0.4)) for k in range(n)]
        z = [zk - c[1] / n for zk in z] if n > 1 else z
        for _ in range(max_iter):
            biggest = 0.0
            for k in range(n):
                p, dp = _horner(c, z[k])
                if p == 0:
                    continue
                ratio = p / dp if dp != 0 else complex(1e-3, 1e-3)
                s = sum(1.0 / (z[k] - z[j]) for j in range(n) if j != k and z[k] != z[j])
                w = ratio / (1.0 - ratio * s)
                z[k] -= w
                biggest = max(biggest, abs(w) / max(1.0, abs(z[k])))
            if biggest < tol:
                break
        polished = []
        for zk in z:
            p, dp = _horner(c, zk)
            if dp != 0:
                cand = zk - p / dp
                if abs(_horner(c, cand)[0]) <= abs(p):
                    zk = cand
            polished.append(zk)
        roots = polished
    roots = roots + [0j] * n_zero
    out = np.array(roots, dtype=complex)
    if np.all(np.isreal(coeffs)):
        # snap numerically real roots of real polynomials onto the axis
        scale = np.maximum(np.abs(out), 1.0)
        real_like = np.abs(out.imag) < 1e-14 * scale
        out[real_like] = out[real_like].real
    order = np.lexsort((out.imag, out.real, -np.abs(out)))
    return out[order]


def eigenvalues(a) -> np.ndarray:
    """Eigenvalues of a small real matrix via its characteristic polynomial.

    The matrix is first shifted by the eigenvalue centroid ``tr(A)/n``.  When
    all eigenvalues cluster (e.g. Floquet multipliers of a weakly perturbed
    oscillator over a full period) the unshifted coefficients lose about
    three quarters of their digits to cancellation; the shifted polynomial
    keeps the cluster resolved.
    """
    a = np.asarray(a, dtype=float)
    shift = np.trace(a) / a.shape[0]
    roots = polyroots(charpoly(a - shift * np.eye(a.shape[0]))) + shift
    order = np.lexsort((roots.imag, roots.real, -np.abs(roots)))
    return roots[order]


def log_abs_det(a) -> float:
    """``ln |det A|`` from an LU factorisation with log-magnitude accumulation."""
    sign, logdet = np.linalg.slogdet(np.asarray(a, dtype=float))
    if sign == 0:
        return -math.inf
    return float(logdet)
