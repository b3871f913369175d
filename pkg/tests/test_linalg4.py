import numpy as np
import pytest

from hotent.linalg4 import charpoly, eigenvalues, log_abs_det, polyroots


def _match(ours, ref):
    """Greedy nearest matching; returns the worst relative mismatch."""
    ref = list(ref)
    worst = 0.0
    scale = max(1.0, max(abs(z) for z in ref))
    for z in ours:
        k = int(np.argmin([abs(z - r) for r in ref]))
        worst = max(worst, abs(z - ref.pop(k)) / scale)
    return worst


def test_charpoly_matches_numpy(rng):
    for _ in range(200):
        a = rng.normal(size=(4, 4))
        assert np.allclose(charpoly(a), np.poly(a), rtol=1e-12, atol=1e-12)


def test_eigenvalues_random_matrices(rng):
    worst = 0.0
    for _ in range(1000):
        a = rng.normal(size=(4, 4)) * rng.choice([1e-3, 1.0, 1e3])
        ours = eigenvalues(a)
        ref = np.linalg.eigvals(a)
        worst = max(worst, _match(ours, ref) * max(1.0, np.max(np.abs(ref))) / np.max(np.abs(ref)))
    assert worst < 1e-8


def test_eigenvalues_near_unit_circle_cluster():
    # monodromy-like: rotation blocks scaled by a common damping factor
    r = 0.97927
    th1, th2 = 0.3, 0.3 + 1e-7
    blk = lambda th: r * np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    q = np.linalg.qr(np.random.default_rng(1).normal(size=(4, 4)))[0]
    a = q @ np.block([[blk(th1), np.zeros((2, 2))], [np.zeros((2, 2)), blk(th2)]]) @ q.T
    assert np.max(np.abs(np.abs(eigenvalues(a)) - r)) < 1e-10


def test_polyroots_matches_numpy(rng):
    for _ in range(300):
        c = np.concatenate([[1.0], rng.normal(size=4)])
        assert _match(polyroots(c), np.roots(c)) < 1e-9


def test_polyroots_sorted_and_real_snapped():
    roots = polyroots(np.poly([3.0, -1.0, 2.0, 0.5]))
    assert np.allclose(roots, [3.0, 2.0, -1.0, 0.5], atol=1e-12)
    assert np.all(np.imag(roots) == 0.0)


def test_log_abs_det(rng):
    a = rng.normal(size=(4, 4))
    assert log_abs_det(a) == pytest.approx(np.log(abs(np.linalg.det(a))), rel=1e-12)
    assert log_abs_det(np.zeros((4, 4))) == -np.inf
