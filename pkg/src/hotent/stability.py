"""Floquet stability of the first-moment dynamics.

The monodromy matrix ``C = D(tau)`` propagates first moments over one drive
period.  Its eigenvalues (Floquet multipliers) all lie inside the unit circle
iff the periodic steady state is asymptotically stable.  By the
Abel--Liouville formula ``det C = exp(-2 (gamma1 + gamma2) tau)``.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .dynamics import DEFAULT_STEPS_PER_PERIOD, propagate_fundamental
from .linalg4 import eigenvalues
from .model import DriveProtocol, SystemParams

__all__ = ["Classification", "StabilityVerdict", "classify", "scan_phase_diagram",
           "ScanResult", "MARGINAL_EPS", "expected_monodromy_det"]

MARGINAL_EPS = 1e-6


class Classification(str, Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    MARGINAL = "Marginal"
    FAILED = "Failed"


@dataclass(frozen=True)
class StabilityVerdict:
    """Monodromy spectrum and classification of one parameter point."""

    max_modulus: float
    classification: Classification
    eigenvalues: tuple
    det_monodromy: float
    period: float
    error: str = ""



def expected_monodromy_det(params: SystemParams, period: float) -> float:
    """Liouville value ``det C = exp(-2 (gamma1 + gamma2) period)``."""
    return math.exp(-2.0 * (params.gamma1 + params.gamma2) * period)


def _classify_modulus(r: float, eps: float) -> Classification:
    if r < 1.0 - eps:
        return Classification.STABLE
    if r > 1.0 + eps:
        return Classification.UNSTABLE
    return Classification.MARGINAL


def classify(params: SystemParams, protocol: DriveProtocol,
             steps_per_period: int = DEFAULT_STEPS_PER_PERIOD,
             period: Optional[float] = None, eps: float = MARGINAL_EPS) -> StabilityVerdict:
    """Classify one parameter point from its Floquet multipliers.

    Parameters
    ----------
    params, protocol
        Physical parameters and drive.
    steps_per_period : int
        RK4 steps over the period.
    period : float, optional
        Reference period for undriven systems (default ``2 pi / omega``).
        Ignored when the system is driven, where ``tau_d`` is used.
    eps : float
        Half-width of the marginal band around unit modulus.
    """
    if protocol.is_driven:
        tau = protocol.tau_d
        proto = protocol
    else:
        tau = 2.0 * math.pi / params.omega if period is None else float(period)
        # an undriven system has no intrinsic period; integrate over ``tau``
        proto = DriveProtocol(protocol.c0, 0.0, 2.0 * math.pi / tau)
    mono = propagate_fundamental(params, proto, tau, steps_per_period).entries
    ev = eigenvalues(mono)
    r = float(np.max(np.abs(ev)))
    return StabilityVerdict(max_modulus=r, classification=_classify_modulus(r, eps),
                            eigenvalues=tuple(complex(z) for z in ev),
                            det_monodromy=float(np.prod(ev).real), period=tau)


@dataclass
class ScanResult:
    """Grid of verdicts; ``verdicts[i][j]`` is at ``(c1_values[i], omega_d_values[j])``."""

    c1_values: np.ndarray
    omega_d_values: np.ndarray
    verdicts: list
    params: SystemParams
    c0: float

    @property
    def max_modulus(self) -> np.ndarray:
        return np.array([[v.max_modulus for v in row] for row in self.verdicts])

    @property
    def classes(self) -> np.ndarray:
        return np.array([[v.classification.value for v in row] for row in self.verdicts])

    def rows(self):
        """Yield ``(c1, omega_d, verdict)`` in index order."""
        for i, c1 in enumerate(self.c1_values):
            for j, wd in enumerate(self.omega_d_values):
                yield float(c1), float(wd), self.verdicts[i][j]


def _scan_point(args):
    params, c0, c1, wd, steps = args
    try:
        return classify(params, DriveProtocol(c0, c1, wd), steps)
    except Exception as exc:  # flagged, never aborts the scan
        return StabilityVerdict(float("nan"), Classification.FAILED, (), float("nan"),
                                2.0 * math.pi / wd if wd > 0 else float("nan"),
                                error="%s: %s" % (type(exc).__name__, exc))


def scan_phase_diagram(params: SystemParams, c1_range: Sequence[float], n_c1: int,
                       omega_d_range: Sequence[float], n_omega_d: int, c0: float = 0.0,
                       steps_per_period: int = DEFAULT_STEPS_PER_PERIOD,
                       workers: Optional[int] = None) -> ScanResult:
    """Classify every point of a ``(c1, omega_d)`` grid.

    Grid values are ``numpy.linspace`` over the closed ranges, ascending.
    ``workers = 0`` uses one process per CPU. With ``workers > 1`` points are evaluated in a process pool; the result
    is assembled by grid index, so it does not depend on completion order.
    """
    if n_c1 < 1 or n_omega_d < 1:
        raise ValueError("grid sizes must be positive")
    if min(omega_d_range) <= 0:
        raise ValueError("omega_d range must lie in (0, inf)")
    c1s = np.linspace(c1_range[0], c1_range[1], int(n_c1))
    wds = np.linspace(omega_d_range[0], omega_d_range[1], int(n_omega_d))
    if workers == 0:
        workers = os.cpu_count() or 1
    tasks = [(params, c0, float(c1), float(wd), steps_per_period) for c1 in c1s for wd in wds]
    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            flat = list(pool.map(_scan_point, tasks, chunksize=max(1, len(tasks) // (8 * workers))))
    else:
        flat = [_scan_point(t) for t in tasks]
    grid = [flat[i * len(wds):(i + 1) * len(wds)] for i in range(len(c1s))]
    return ScanResult(c1s, wds, grid, params, c0)
