import math

import numpy as np
import pytest

from hotent.quadrature import QuadratureError, adaptive_gauss_legendre, panel_edges


def test_polynomial_exactness():
    coeffs = np.random.default_rng(3).normal(size=64)
    poly = np.polynomial.Polynomial(coeffs)
    exact = poly.integ()(1.0) - poly.integ()(-1.0)
    res = adaptive_gauss_legendre(poly, -1.0, 1.0, tol=1e-14)
    assert res.value[0] == pytest.approx(exact, rel=1e-12)
    assert res.n_panels == 1


def test_oscillatory_integral():
    k = 200.0
    res = adaptive_gauss_legendre(lambda x: np.cos(k * x) * np.exp(-x), 0.0, 10.0,
                                  max_width=0.1, tol=1e-12)
    exact = (1 + math.exp(-10) * (k * math.sin(10 * k) - math.cos(10 * k))) / (1 + k * k)
    assert res.value[0] == pytest.approx(exact, rel=1e-9)


def test_kink_at_breakpoint():
    c = 0.3
    f = lambda x: np.abs(x - c) * np.exp(x)
    # int_0^c (c - x) e^x dx = e^c - 1 - c ;  int_c^1 (x - c) e^x dx = e^c - c e
    exact = (math.exp(c) - 1 - c) + (math.exp(c) - c * math.e)
    res = adaptive_gauss_legendre(f, 0.0, 1.0, breakpoints=[c], tol=1e-13)
    assert res.value[0] == pytest.approx(exact, rel=1e-13)


def test_vector_integrand():
    f = lambda x: np.array([np.sin(x), x ** 2, np.exp(-x)])
    res = adaptive_gauss_legendre(f, 0.0, 2.0, tol=1e-13)
    assert np.allclose(res.value, [1 - math.cos(2), 8 / 3, 1 - math.exp(-2)], rtol=1e-13)


def test_failure_reports_worst_panel():
    # integrable endpoint singularity: unresolvable within three refinements
    with pytest.raises(QuadratureError) as info:
        adaptive_gauss_legendre(lambda x: 1.0 / np.sqrt(x), 0.0, 1.0, tol=1e-12, nodes=4,
                                max_depth=3)
    lo, hi, err = info.value.worst_panel
    assert lo == 0.0 and hi <= 1.0 / 8 and err > 0


def test_panel_edges():
    e = panel_edges(0.0, 10.0, breakpoints=[2.5, 20.0, -1.0], max_width=1.0)
    assert e[0] == 0.0 and e[-1] == 10.0 and 2.5 in e
    assert np.all(np.diff(e) <= 1.0 + 1e-12) and np.all(np.diff(e) > 0)
    with pytest.raises(ValueError):
        adaptive_gauss_legendre(np.sin, 1.0, 1.0)
