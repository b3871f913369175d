"""Shared fixtures and independent constructions used as test oracles."""
import math

import numpy as np
import pytest
import scipy.linalg

SIGMA_FORM = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])


def random_symplectic(rng, scale=0.6):
    """``expm(Sigma H)`` with random symmetric ``H`` is symplectic for ``Sigma``."""
    h = rng.normal(scale=scale, size=(4, 4))
    h = 0.5 * (h + h.T)
    return scipy.linalg.expm(SIGMA_FORM @ h)


def random_physical_covariance(rng, scale=0.6, nu_max=5.0):
    """Williamson form ``S diag(nu1, nu2, nu1, nu2) S^T`` with ``nu_i >= 1/2``."""
    s = random_symplectic(rng, scale)
    nu = 0.5 + rng.uniform(0.0, nu_max, size=2)
    return s @ np.diag([nu[0], nu[1], nu[0], nu[1]]) @ s.T, np.sort(nu)


def bogoliubov_tmst(eta, theta, n1, n2):
    """Two-mode squeezed thermal covariance from the mode transformation.

    ``a1 -> a1 cosh eta - e^{i theta} a2^dag sinh eta`` (and 1 <-> 2), acting
    on a thermal product; ``x = (a + a^dag)/sqrt 2``, ``p = -i (a - a^dag)/sqrt 2``
    with ``m = omega = 1``.  Returns the 4x4 matrix in ``(x1, x2, p1, p2)``.
    """
    ch, sh = math.cosh(eta), math.sinh(eta)
    e = np.exp(1j * theta)
    # A = (a1, a2, a1^dag, a2^dag);  A' = B A
    b = np.array([[ch, 0, 0, -e * sh],
                  [0, ch, -e * sh, 0],
                  [0, -np.conj(e) * sh, ch, 0],
                  [-np.conj(e) * sh, 0, 0, ch]], dtype=complex)
    r = 1 / math.sqrt(2)
    t = np.array([[r, 0, r, 0], [0, r, 0, r], [-1j * r, 0, 1j * r, 0], [0, -1j * r, 0, 1j * r]])
    g = np.diag([n1 + 0.5, n2 + 0.5, n1 + 0.5, n2 + 0.5])
    m = t @ b
    cov = m @ g @ m.conj().T
    assert np.max(np.abs(cov.imag)) < 1e-9 * max(1.0, np.max(np.abs(cov)))
    return cov.real


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
